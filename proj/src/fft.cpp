#include "fracfb/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace fracfb {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(cdouble* data, std::size_t n, bool inverse) {
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("fft_inplace: size must be a power of two");
    }
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const cdouble wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble a = data[i + k];
                const cdouble b = data[i + k + len / 2] * w;
                data[i + k] = a + b;
                data[i + k + len / 2] = a - b;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) data[i] *= inv;
    }
}

namespace {

void fft2_inplace(std::vector<cdouble>& a, int p, bool inverse) {
    // rows
    for (int y = 0; y < p; ++y) fft_inplace(a.data() + static_cast<std::size_t>(y) * p, p, inverse);
    // columns via gather/scatter
    std::vector<cdouble> col(static_cast<std::size_t>(p));
    for (int x = 0; x < p; ++x) {
        for (int y = 0; y < p; ++y) col[static_cast<std::size_t>(y)] = a[static_cast<std::size_t>(y) * p + x];
        fft_inplace(col.data(), static_cast<std::size_t>(p), inverse);
        for (int y = 0; y < p; ++y) a[static_cast<std::size_t>(y) * p + x] = col[static_cast<std::size_t>(y)];
    }
}

} // namespace

ConvolutionPlan::ConvolutionPlan(int n, const std::vector<double>& kernel_by_abs_offset)
    : dim_(1), nx_(n) {
    if (n < 1 || static_cast<int>(kernel_by_abs_offset.size()) < n) {
        throw std::invalid_argument("ConvolutionPlan: bad 1D kernel table");
    }
    pad_ = static_cast<int>(next_pow2(static_cast<std::size_t>(2 * n - 1)));
    kernel_hat_.assign(static_cast<std::size_t>(pad_), cdouble(0.0, 0.0));
    for (int d = 0; d < n; ++d) {
        kernel_hat_[static_cast<std::size_t>(d)] = kernel_by_abs_offset[static_cast<std::size_t>(d)];
        if (d > 0) kernel_hat_[static_cast<std::size_t>(pad_ - d)] = kernel_by_abs_offset[static_cast<std::size_t>(d)];
    }
    fft_inplace(kernel_hat_.data(), kernel_hat_.size(), false);
    work_.assign(kernel_hat_.size(), cdouble(0.0, 0.0));
}

ConvolutionPlan::ConvolutionPlan(int nx, int ny, const std::vector<double>& kernel_by_abs_offset)
    : dim_(2), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1 ||
        static_cast<int>(kernel_by_abs_offset.size()) < nx * ny) {
        throw std::invalid_argument("ConvolutionPlan: bad 2D kernel table");
    }
    const int need = 2 * std::max(nx, ny) - 1;
    pad_ = static_cast<int>(next_pow2(static_cast<std::size_t>(need)));
    kernel_hat_.assign(static_cast<std::size_t>(pad_) * pad_, cdouble(0.0, 0.0));
    for (int dy = 0; dy < ny; ++dy) {
        for (int dx = 0; dx < nx; ++dx) {
            const double v = kernel_by_abs_offset[static_cast<std::size_t>(dy) * nx + dx];
            const int px[2] = {dx, pad_ - dx};
            const int py[2] = {dy, pad_ - dy};
            for (int sy = 0; sy < (dy > 0 ? 2 : 1); ++sy) {
                for (int sx = 0; sx < (dx > 0 ? 2 : 1); ++sx) {
                    kernel_hat_[static_cast<std::size_t>(py[sy]) * pad_ + px[sx]] = v;
                }
            }
        }
    }
    fft2_inplace(kernel_hat_, pad_, false);
    work_.assign(kernel_hat_.size(), cdouble(0.0, 0.0));
}

void ConvolutionPlan::apply(const double* in, double* out) const {
    if (dim_ == 1) {
        const std::size_t p = static_cast<std::size_t>(pad_);
        work_.assign(p, cdouble(0.0, 0.0));
        for (int i = 0; i < nx_; ++i) work_[static_cast<std::size_t>(i)] = in[i];
        fft_inplace(work_.data(), p, false);
        for (std::size_t i = 0; i < p; ++i) work_[i] *= kernel_hat_[i];
        fft_inplace(work_.data(), p, true);
        for (int i = 0; i < nx_; ++i) out[i] = work_[static_cast<std::size_t>(i)].real();
    } else {
        const std::size_t p = static_cast<std::size_t>(pad_);
        work_.assign(p * p, cdouble(0.0, 0.0));
        for (int y = 0; y < ny_; ++y) {
            for (int x = 0; x < nx_; ++x) {
                work_[static_cast<std::size_t>(y) * p + x] = in[static_cast<std::size_t>(y) * nx_ + x];
            }
        }
        fft2_inplace(work_, pad_, false);
        for (std::size_t i = 0; i < p * p; ++i) work_[i] *= kernel_hat_[i];
        fft2_inplace(work_, pad_, true);
        for (int y = 0; y < ny_; ++y) {
            for (int x = 0; x < nx_; ++x) {
                out[static_cast<std::size_t>(y) * nx_ + x] = work_[static_cast<std::size_t>(y) * p + x].real();
            }
        }
    }
}

std::size_t ConvolutionPlan::memory_bytes() const {
    return (kernel_hat_.size() + work_.size()) * sizeof(cdouble);
}

} // namespace fracfb
