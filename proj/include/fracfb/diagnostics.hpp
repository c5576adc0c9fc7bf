// Quantitative checks on computed fields: bounds, positivity volume,
// Hoelder seminorms, free-boundary extraction and measure, growth slopes,
// density ratios, and the interior Harnack ratio.
#pragma once

#include <vector>

#include "fracfb/grid.hpp"

namespace fracfb {

struct BoundsReport {
    double min_u = 0.0;
    double max_u = 0.0;
    double lower_violation = 0.0; // sup (-u)_+
    double upper_violation = 0.0; // sup (u - max phi)_+
};

BoundsReport bounds_check(const ScalarField& u, const ScalarField& phi);

// h^n * count of cells with u > tau_pos outside the domain.
double positivity_volume(const ScalarField& u, const ScalarField& chi_omega,
                         double tau_pos);

struct HolderEstimate {
    double lambda = 0.0;
    double seminorm = 0.0;
    long pair_count = 0;
};

// sup over sampled index pairs of |u(x)-u(y)| / |x-y|^lambda. stride
// subsamples both endpoints; stride 1 scans all pairs.
HolderEstimate holder_seminorm(const ScalarField& u, double lambda, int stride);

struct BoundaryFace {
    long positive_cell = 0;
    long nonpositive_cell = 0;
};

struct BoundaryPoint {
    long index = 0;       // positive-side grid point
    bool interior = false; // lies inside the domain
    double dist_omega = 0.0;
    double dist_box = 0.0;
};

struct FreeBoundaryExtract {
    std::vector<BoundaryFace> faces;
    std::vector<BoundaryPoint> points;
    double measure_estimate = 0.0; // crossing count (1D) / contour length (2D)
    double tau = 0.0;
    bool everywhere_positive_warning = false;
};

// Faces separating {u > tau_pos} from its complement. The measure estimate
// interpolates the tau-level set linearly inside each cell, so a smooth
// curved boundary is measured by its polygonal length rather than by the
// axis-aligned staircase.
FreeBoundaryExtract free_boundary_extract(const ScalarField& u, double tau_pos,
                                          const DomainSpec* domain = nullptr);

struct GrowthFit {
    long index = 0;
    bool defined = false;
    bool interior = false;
    double slope = 0.0;     // least-squares slope of log sup_{B_r} u vs log r
    double min_ratio = 0.0; // min over r of sup_{B_r} u / r^alpha
};

// Growth scan at extracted boundary points over the given radii, keeping
// radii in (2h, dist/2) where dist is the distance to the nearest of the
// domain boundary and the box boundary. Throws if fewer than 3 radii are
// supplied; points with fewer than 3 usable radii come back flagged.
std::vector<GrowthFit> nondegeneracy_scan(const ScalarField& u,
                                          const FreeBoundaryExtract& boundary,
                                          const std::vector<double>& radii, double alpha);

struct DensityResult {
    long index = 0;
    double min_pos_density = 0.0;  // min over r of |{u > tau} ∩ B_r| / r^n
    double min_zero_density = 0.0; // min over r of |{u <= tau} ∩ B_r| / r^n
    bool flagged = false;          // a density vanished at every radius
};

std::vector<DensityResult> density_check(const ScalarField& u,
                                         const FreeBoundaryExtract& boundary,
                                         const std::vector<double>& radii, double tau_pos);

struct HarnackResult {
    double ratio = 0.0;
    double sup = 0.0;
    double inf = 0.0;
    long region_size = 0;
    bool infinite = false;
};

// sup/inf of u over the erosion of D = [Omega ∩ {u > phi + contact_tol}]
// ∪ [{u > tau_pos} \ Omega] by shrink times the inradius of D.
HarnackResult harnack_ratio(const ScalarField& u, const ScalarField& phi,
                            const ScalarField& chi_omega, double tau_pos, double shrink,
                            double contact_tol = 1e-8);

} // namespace fracfb
