// Radix-2 complex FFT and zero-padded circular convolution plans.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fracfb {

using cdouble = std::complex<double>;

// In-place iterative radix-2 FFT. n must be a power of two.
// inverse=true applies the conjugate transform and divides by n.
void fft_inplace(cdouble* data, std::size_t n, bool inverse);

std::size_t next_pow2(std::size_t n);

// Precomputed circular-convolution plan for a fixed real kernel on a
// 1D or 2D uniform index lattice. The kernel is given by its value per
// signed index offset and is embedded in a padded circulant, so
// out[i] = sum_j kernel(i - j) * in[j] for all lattice points i.
class ConvolutionPlan {
  public:
    // 1D: kernel_offset(d) for d in [-(n-1), n-1].
    ConvolutionPlan(int n, const std::vector<double>& kernel_by_abs_offset);
    // 2D: kernel_offset(dx, dy) indexed as abs_table[ady * n + adx].
    ConvolutionPlan(int nx, int ny, const std::vector<double>& kernel_by_abs_offset);

    // in/out have n (1D) or nx*ny (2D, row-major y-outer) entries.
    void apply(const double* in, double* out) const;

    int padded_size() const { return pad_; }
    std::size_t memory_bytes() const;

  private:
    int dim_;
    int nx_ = 0;
    int ny_ = 0;
    int pad_ = 0;
    std::vector<cdouble> kernel_hat_;
    mutable std::vector<cdouble> work_;
};

} // namespace fracfb
