#pragma once

// 1D quadrature tools shared by the kernel and operator modules:
// Gauss-Legendre rules of arbitrary order, graded panel subdivision
// toward integrable endpoint singularities, and an oscillatory
// integrator that sums between sine zeros with Euler acceleration.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace fkl {

struct QuadRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

/// Gauss-Legendre rule of order n (Newton iteration on P_n; nodes to ~1e-15).
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");

    QuadRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, int order = 16) {
    const QuadRule& r = gauss_legendre(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

/// Panels graded geometrically toward `a` (ratio < 1 shrinks toward a).
/// Handles endpoint singularities integrable at a, e.g. u^{1-alpha}.
template <class F>
double integrate_graded(F&& f, double a, double b, int panels = 30, double ratio = 0.6,
                        int order = 16) {
    if (b <= a) return 0.0;
    double s = 0.0;
    double hi = b;
    double len = (b - a) * (1.0 - ratio);
    for (int p = 0; p < panels - 1; ++p) {
        double lo = hi - len;
        s += integrate_gl(f, lo, hi, order);
        hi = lo;
        len *= ratio;
    }
    s += integrate_gl(f, a, hi, order);  // innermost sliver
    return s;
}

/// Adaptive GL with interval bisection; absolute/relative mixed tolerance.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-10, int max_depth = 24,
                          double* err_out = nullptr) {
    struct Rec {
        const std::function<double(double)>& g;
        double tol;
        double err = 0.0;
        double run(double lo, double hi, double whole, int depth, double loc_tol) {
            double mid = 0.5 * (lo + hi);
            double left = integrate_gl(g, lo, mid, 16);
            double right = integrate_gl(g, mid, hi, 16);
            double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= loc_tol) {
                err += std::abs(delta);
                return left + right + delta / 63.0;
            }
            return run(lo, mid, left, depth - 1, 0.5 * loc_tol) +
                   run(mid, hi, right, depth - 1, 0.5 * loc_tol);
        }
    };
    std::function<double(double)> g = std::forward<F>(f);
    Rec rec{g, tol};
    double whole = integrate_gl(g, a, b, 16);
    double v = rec.run(a, b, whole, max_depth, tol);
    if (err_out) *err_out = rec.err;
    return v;
}

/// Sum of an eventually-alternating sequence with Euler's transform applied
/// to the final `tail` terms. `terms` holds the raw segment integrals.
inline double euler_sum(const std::vector<double>& terms, std::size_t tail = 12) {
    if (terms.empty()) return 0.0;
    if (terms.size() <= tail + 2 || tail < 2) {
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    }
    std::size_t head = terms.size() - tail;
    double s = 0.0;
    for (std::size_t i = 0; i < head; ++i) s += terms[i];
    // Euler transform of the alternating tail via the averaging table.
    std::vector<double> row(terms.begin() + head, terms.end());
    std::vector<double> partial(row.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        acc += row[i];
        partial[i] = acc;
    }
    while (partial.size() > 1) {
        for (std::size_t i = 0; i + 1 < partial.size(); ++i)
            partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        partial.pop_back();
    }
    return s + partial[0];
}

}  // namespace fkl
