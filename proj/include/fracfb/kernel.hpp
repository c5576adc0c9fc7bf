// Discrete fractional Laplacian and Gagliardo energy on the truncated grid.
//
// Pairwise weights use the kernel |x-y|^(-n-2a). The operator carries the
// normalization constant c making the Fourier symbol |xi|^(2a); the energy
// carries no constant. Fields are extended by zero outside the box; that
// exterior contribution enters through a per-point tail coefficient
// integrated over the complement of the half-cell-padded box.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fracfb/fft.hpp"
#include "fracfb/grid.hpp"

namespace fracfb {

struct FracParams {
    double alpha = 0.5;
    double c_norm = 0.0; // normalization constant c_{n,alpha}

    static FracParams standard(int dimension, double alpha);
};

// c_{n,a} = 4^a Gamma(n/2 + a) / (pi^(n/2) |Gamma(-a)|), the constant making
// the symbol of the operator |xi|^(2a).
double normalization_constant(int dimension, double alpha);

class KernelTable {
  public:
    KernelTable(const GridSpec& grid, const FracParams& frac);

    const GridSpec& grid() const { return grid_; }
    const FracParams& frac() const { return frac_; }

    // Energy-kernel weight h^n / |offset|^(n+2a) for a signed index offset.
    double weight_energy(int dx, int dy = 0) const;
    // Tail integral over the padded-box complement, no constant, no h^n.
    double tail_raw(long i) const { return tail_raw_[static_cast<std::size_t>(i)]; }
    // Row sum of energy weights over all other grid points.
    double rowsum_energy(long i) const { return rowsum_[static_cast<std::size_t>(i)]; }

    // v_i = sum_{j != i} w(x_i - x_j) (u_i - u_j) + t_i u_i with
    // w(d) = c h^n |d|^(-n-2a) and t_i = c * tail_raw_i. The dense form is
    // the reference; the fast form evaluates the same sums through a padded
    // circular convolution.
    ScalarField apply_dense(const ScalarField& u, bool include_tail = true) const;
    ScalarField apply_fast(const ScalarField& u, bool include_tail = true) const;

    // Operator sums without the constant: apply_* / c. Used by the energy.
    ScalarField apply_raw_fast(const ScalarField& u, bool include_tail = true) const;

    std::size_t memory_bytes() const { return memory_bytes_; }

  private:
    void check_grid(const ScalarField& u) const;
    void raw_apply(const ScalarField& u, bool include_tail, bool dense, ScalarField& out) const;

    GridSpec grid_;
    FracParams frac_;
    std::vector<double> offsets_;   // energy weights per |offset| (1D: N, 2D: N*N)
    std::vector<double> rowsum_;    // per point, dense-accumulated
    std::vector<double> tail_raw_;  // per point
    std::unique_ptr<ConvolutionPlan> conv_;
    std::size_t memory_bytes_ = 0;
};

// Reference and fast forms of the operator as free functions.
inline ScalarField frac_laplacian_apply(const KernelTable& kernel, const ScalarField& u) {
    return kernel.apply_dense(u);
}
inline ScalarField frac_laplacian_apply_fast(const KernelTable& kernel,
                                             const ScalarField& u) {
    return kernel.apply_fast(u);
}

// J_h(u) = sum_{i != j} w~(x_i-x_j) (u_i-u_j)^2 h^n + 2 sum_i t~_i u_i^2 with
// the plain energy kernel (no constant). Evaluated through the identity
// J_h(u) = (2 h^n / c) sum_i u_i [apply u]_i.
double gagliardo_energy(const KernelTable& kernel, const ScalarField& u);

// Symmetric bilinear form with B(u, u) = J_h(u).
double dirichlet_pairing(const KernelTable& kernel, const ScalarField& u,
                         const ScalarField& w);

// Adaptive-quadrature evaluation of the principal-value integral
// c PV int (f(x) - f(y)) |x - y|^(-1-2a) dy for a 1D function f supported
// in [-support, support]. Independent of the grid discretization; used as
// an accuracy oracle. tol is the self-consistency target.
double pv_integral_oracle_1d(const std::function<double(double)>& f, double x,
                             double alpha, double support, double tol);

} // namespace fracfb
