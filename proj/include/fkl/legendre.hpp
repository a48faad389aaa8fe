#pragma once

// Legendre-sector decomposition of rotation-invariant kernels on R^3.
//
// A kernel k(x,y) = k(|x-y|) decomposes as
//   k(x,y) = sum_l (2l+1)/(4pi) k_l(|x|,|y|) P_l(cos angle(x,y)),
//   k_l(r,rho) = 2 pi int_{-1}^{1} k(sqrt(r^2+rho^2-2 r rho u)) P_l(u) du,
// and kernels compose sector-by-sector with the radial measure rho^2 drho.
// The u-integral is taken on panels graded into u = 1, where the kernel's
// near-diagonal boundary layer lives.

#include <cmath>
#include <functional>
#include <vector>

#include "fkl/quadrature.hpp"

namespace fkl {

/// P_0(x) .. P_{lmax}(x) by the three-term recurrence.
inline void legendre_all(double x, int lmax, double* out) {
    out[0] = 1.0;
    if (lmax == 0) return;
    out[1] = x;
    for (int l = 1; l < lmax; ++l)
        out[l + 1] = ((2.0 * l + 1.0) * x * out[l] - l * out[l - 1]) / (l + 1.0);
}

/// Quadrature nodes/weights on u in [-1, 1] graded into u = 1 down to the
/// scale `layer` of the integrand's boundary layer there.
struct AngularGrid {
    std::vector<double> u;
    std::vector<double> w;

    AngularGrid(double layer, int order = 8, int per_decade = 5) {
        layer = std::max(std::min(layer, 1.0), 1e-12);
        // panels in v = 1-u: [v_k+1 .. v_k] geometric from 2 down to ~layer/30
        std::vector<double> edges{2.0};
        double v = 1.0;
        double stop = std::max(layer / 30.0, 1e-13);
        double ratio = std::pow(10.0, -1.0 / per_decade);
        while (v > stop) {
            edges.push_back(v);
            v *= ratio;
        }
        edges.push_back(0.0);
        const QuadRule& rule = gauss_legendre(order);
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            double hi = edges[k], lo = edges[k + 1];
            double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                u.push_back(1.0 - (mid + half * rule.x[i]));
                w.push_back(rule.w[i] * half);
            }
        }
    }
};

/// Sector coefficients k_l(r, rho), l = 0..lmax, of a radial-distance kernel.
inline void sector_project(const std::function<double(double)>& kernel_of_dist, double r,
                           double rho, int lmax, const AngularGrid& grid, double* out) {
    std::vector<double> pl(static_cast<std::size_t>(lmax) + 1);
    for (int l = 0; l <= lmax; ++l) out[l] = 0.0;
    for (std::size_t i = 0; i < grid.u.size(); ++i) {
        double u = grid.u[i];
        double dist2 = r * r + rho * rho - 2.0 * r * rho * u;
        double k = kernel_of_dist(dist2 > 0.0 ? std::sqrt(dist2) : 0.0);
        if (k == 0.0) continue;
        legendre_all(u, lmax, pl.data());
        double kw = k * grid.w[i];
        for (int l = 0; l <= lmax; ++l) out[l] += kw * pl[l];
    }
    for (int l = 0; l <= lmax; ++l) out[l] *= 2.0 * M_PI;
}

/// Evaluate a sector series at angle cosine u: sum_l (2l+1)/(4pi) c_l P_l(u).
inline double sector_sum(const double* coeff, int lmax, double u) {
    std::vector<double> pl(static_cast<std::size_t>(lmax) + 1);
    legendre_all(u, lmax, pl.data());
    double s = 0.0;
    for (int l = 0; l <= lmax; ++l) s += (2.0 * l + 1.0) * coeff[l] * pl[l];
    return s / (4.0 * M_PI);
}

}  // namespace fkl
