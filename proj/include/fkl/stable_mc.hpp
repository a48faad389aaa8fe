#pragma once

// Feynman-Kac Monte Carlo oracle for e^{-t Lambda^eps}(x, y).
//
// The isotropic alpha-stable process is simulated by subordination: a
// Brownian increment run at twice an (alpha/2)-stable subordinator
// increment, the subordinator sampled by the Chambers-Mallows-Stuck /
// Kanter construction. Each path carries the multiplicative weight
// exp(int_0^t V_eps(X_s) ds) (trapezoid on the skeleton); the kernel is
// estimated by a small ball around the target.
//
// Randomness: one counter-derived stream per path, so results do not
// depend on the thread schedule.

#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <random>
#include <vector>

#include "fkl/constants.hpp"
#include "fkl/parallel.hpp"

namespace fkl {

struct MCConfig {
    std::size_t paths = 100000;
    double dt = 0.004;
    double bandwidth = 0.25;  // kernel-estimation ball radius h
    std::uint64_t seed = 20240901;

    void validate(bool acceptance_run = false) const {
        if (acceptance_run && paths < 10000)
            throw std::domain_error("MCConfig: acceptance runs require >= 1e4 paths");
        if (!(dt > 0.0) || !(bandwidth > 0.0))
            throw std::domain_error("MCConfig: dt and bandwidth must be positive");
    }
};

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    bool heavy_tail_flag = false;  // top 1% of weights carry > 50% of the total
    std::size_t paths = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// One-sided stable S with E e^{-lambda S} = exp(-lambda^a), 0 < a < 1
/// (Kanter's representation).
inline double one_sided_stable(double a, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(1e-12, M_PI - 1e-12);
    std::uniform_real_distribution<double> unit(1e-300, 1.0);
    double u = unif(rng);
    double w = -std::log(unit(rng));  // Exp(1)
    double A = std::pow(std::sin(a * u), a) * std::pow(std::sin((1.0 - a) * u), 1.0 - a) /
               std::sin(u);
    return std::pow(A / std::pow(w, 1.0 - a), 1.0 / a);
}

}  // namespace detail

/// Increment of the isotropic alpha-stable process over time dt, d = 3:
/// X_{t+dt} - X_t = sqrt(2 S) Z with S = dt^{2/alpha} S_1.
inline std::array<double, 3> stable_increment(double alpha, double dt,
                                              std::mt19937_64& rng) {
    double s = std::pow(dt, 2.0 / alpha) * detail::one_sided_stable(0.5 * alpha, rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double sd = std::sqrt(2.0 * s);
    return {sd * gauss(rng), sd * gauss(rng), sd * gauss(rng)};
}

/// Max |z-score| of the empirical characteristic function of X_1 against
/// e^{-|xi|^alpha} over `n_freq` frequencies. Used to validate the sampler.
inline double validate_stable_sampler(double alpha, std::size_t n_samples,
                                      std::uint64_t seed, int n_freq = 20) {
    std::vector<double> worst(n_freq, 0.0);
    std::vector<double> sums(n_freq, 0.0), sq(n_freq, 0.0);
    std::mutex mu;
    int workers = worker_count();
    std::vector<std::vector<double>> psums(workers), psq(workers);
    std::size_t chunk = (n_samples + workers - 1) / workers;
    parallel_for(0, static_cast<std::size_t>(workers), [&](std::size_t w) {
        psums[w].assign(n_freq, 0.0);
        psq[w].assign(n_freq, 0.0);
        std::size_t lo = w * chunk, hi = std::min(n_samples, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            std::mt19937_64 rng(detail::splitmix64(seed ^ (0x1234abcdULL + i)));
            auto inc = stable_increment(alpha, 1.0, rng);
            for (int k = 0; k < n_freq; ++k) {
                double xi = 0.15 * (k + 1);  // frequencies along the first axis
                double c = std::cos(xi * inc[0]);
                psums[w][k] += c;
                psq[w][k] += c * c;
            }
        }
    });
    for (int w = 0; w < workers; ++w)
        for (int k = 0; k < n_freq; ++k) {
            sums[k] += psums[w][k];
            sq[k] += psq[w][k];
        }
    double max_z = 0.0;
    for (int k = 0; k < n_freq; ++k) {
        double xi = 0.15 * (k + 1);
        double mean = sums[k] / n_samples;
        double var = sq[k] / n_samples - mean * mean;
        double se = std::sqrt(std::max(var, 1e-30) / n_samples);
        double want = std::exp(-std::pow(std::abs(xi), alpha));
        max_z = std::max(max_z, std::abs(mean - want) / se);
    }
    (void)mu;
    return max_z;
}

/// e^{-t Lambda^eps}(x, y) estimated as
///   E^x[ exp(int_0^t V_eps(X_s) ds) 1_{|X_t - y| <= h} ] / vol(B_h).
inline MCEstimate feynman_kac_mc(const std::array<double, 3>& x,
                                 const std::array<double, 3>& y, double t,
                                 const MCConfig& mc, const ProblemParams& params) {
    params.validate();
    if (!(params.eps > 0.0))
        throw std::domain_error("feynman_kac_mc: regularized potential (eps > 0) required");
    mc.validate();
    const double hardy = 1.0 / std::pow(c_constant(0.5 * params.alpha, 2.0, params.d), 2.0);
    const std::size_t n_steps = std::max<std::size_t>(1, static_cast<std::size_t>(t / mc.dt));
    const double dt = t / static_cast<double>(n_steps);
    const double vol_ball = 4.0 / 3.0 * M_PI * std::pow(mc.bandwidth, 3.0);

    const std::size_t n = mc.paths;
    std::vector<double> contrib(n, 0.0);
    std::vector<double> weights(n, 0.0);
    parallel_for(0, n, [&](std::size_t i) {
        std::mt19937_64 rng(detail::splitmix64(mc.seed ^ (0x9e3779b9ULL * (i + 1))));
        std::array<double, 3> pos = x;
        auto vpot = [&](const std::array<double, 3>& p) {
            double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            return params.delta * hardy * std::pow(r2 + params.eps, -0.5 * params.alpha);
        };
        double integral = 0.0;
        double v_prev = vpot(pos);
        for (std::size_t k = 0; k < n_steps; ++k) {
            auto inc = stable_increment(params.alpha, dt, rng);
            pos = {pos[0] + inc[0], pos[1] + inc[1], pos[2] + inc[2]};
            double v_next = vpot(pos);
            integral += 0.5 * dt * (v_prev + v_next);
            v_prev = v_next;
        }
        double w = std::exp(integral);
        weights[i] = w;
        double dx = pos[0] - y[0], dy = pos[1] - y[1], dz = pos[2] - y[2];
        if (dx * dx + dy * dy + dz * dz <= mc.bandwidth * mc.bandwidth)
            contrib[i] = w / vol_ball;
    });

    MCEstimate out;
    out.paths = n;
    double sum = 0.0, sumsq = 0.0;
    for (double c : contrib) {
        sum += c;
        sumsq += c * c;
    }
    out.value = sum / n;
    double var = sumsq / n - out.value * out.value;
    out.std_error = std::sqrt(std::max(var, 0.0) / n);

    // Weight-concentration guard: if the top 1% of path weights carry more
    // than half the total, the estimator variance is unreliable.
    std::vector<double> w_sorted = weights;
    std::sort(w_sorted.begin(), w_sorted.end());
    double total = 0.0, top = 0.0;
    for (double w : w_sorted) total += w;
    std::size_t top_count = std::max<std::size_t>(1, n / 100);
    for (std::size_t i = n - top_count; i < n; ++i) top += w_sorted[i];
    out.heavy_tail_flag = top > 0.5 * total;
    return out;
}

}  // namespace fkl
