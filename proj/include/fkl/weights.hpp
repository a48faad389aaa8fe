#pragma once

// Desingularizing weight family phi_s(x) = eta(s^{-1/alpha} |x|).
//
// eta is r^{-d+beta} on (0,1), 1/2 on [2,inf), and a C^2 transition on
// [1,2]. The transition is the unique quintic Hermite interpolant matching
// value and two derivatives at both junctions; if that interpolant dips
// below 1/2 or loses monotonicity (checked by sampling at construction)
// a smoothstep blend of the two branch log-profiles is used instead and
// re-verified.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "fkl/constants.hpp"

namespace fkl {

class RadialWeight {
  public:
    enum class Transition { quintic, log_blend, slope_spike };

    RadialWeight(int d, double alpha, double beta, double s = 1.0)
        : d_(d), alpha_(alpha), beta_(beta), s_(s) {
        if (!(s > 0.0)) throw std::domain_error("RadialWeight: scale s must be > 0");
        if (!(beta > 0.0 && beta <= d))
            throw std::domain_error("RadialWeight: beta outside (0, d]");
        const double p = beta_ - d_;  // power-branch exponent, negative
        // Quintic in u = r - 1 matching (1, p, p(p-1)) at u=0 and (1/2, 0, 0) at u=1.
        const double a0 = p * (p - 1.0);
        coef_ = {1.0,
                 p,
                 0.5 * a0,
                 -10.0 * 1.0 - 6.0 * p - 1.5 * a0 + 10.0 * 0.5,
                 15.0 * 1.0 + 8.0 * p + 1.5 * a0 - 15.0 * 0.5,
                 -6.0 * 1.0 - 3.0 * p - 0.5 * a0 + 6.0 * 0.5};
        kind_ = Transition::quintic;
        if (!transition_admissible()) {
            kind_ = Transition::log_blend;
            if (!transition_admissible()) {
                bool ok = init_slope_spike();
                kind_ = Transition::slope_spike;
                if (!ok || !transition_admissible())
                    throw std::runtime_error(
                        "RadialWeight: no admissible C^2 transition for beta = " +
                        std::to_string(beta) + ", d = " + std::to_string(d));
            }
        }
    }

    static RadialWeight from_constants(const DerivedConstants& c, double s = 1.0) {
        return RadialWeight(c.params.d, c.params.alpha, c.beta, s);
    }

    int d() const { return d_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double s() const { return s_; }
    Transition transition() const { return kind_; }
    const std::array<double, 6>& transition_coefficients() const { return coef_; }

    double eta(double r) const {
        if (!(r > 0.0)) throw std::domain_error("eta: requires r > 0");
        if (r < 1.0) return std::pow(r, beta_ - d_);
        if (r >= 2.0) return 0.5;
        return transition_value(r);
    }

    double eta_d1(double r) const {
        if (!(r > 0.0)) throw std::domain_error("eta_d1: requires r > 0");
        const double p = beta_ - d_;
        if (r < 1.0) return p * std::pow(r, p - 1.0);
        if (r >= 2.0) return 0.0;
        return transition_deriv(r, 1);
    }

    double eta_d2(double r) const {
        if (!(r > 0.0)) throw std::domain_error("eta_d2: requires r > 0");
        const double p = beta_ - d_;
        if (r < 1.0) return p * (p - 1.0) * std::pow(r, p - 2.0);
        if (r >= 2.0) return 0.0;
        return transition_deriv(r, 2);
    }

    /// phi_s at radius |x| = r. The scale defaults to the stored s.
    double phi_radial(double r, double s) const {
        if (!(r > 0.0)) throw std::domain_error("phi: weight is singular at x = 0");
        if (!(s > 0.0)) throw std::domain_error("phi: scale must be > 0");
        return eta(std::pow(s, -1.0 / alpha_) * r);
    }
    double phi_radial(double r) const { return phi_radial(r, s_); }

    double phi(std::span<const double> x, double s) const {
        double q = 0.0;
        for (double xi : x) q += xi * xi;
        return phi_radial(std::sqrt(q), s);
    }

  private:
    // Steep-slope transition: -eta'(1+s) = |p| (1-s)^n (1 + q1 s), with n, q1
    // solving the curvature junction and the exact total descent of 1/2.
    // Real solutions exist for |p| >= (16+sqrt(224))/16 ~ 1.935, which covers
    // everything the quintic cannot handle.
    bool init_slope_spike() {
        const double ap = d_ - beta_;  // |p|
        double disc = 8.0 * ap * ap - 16.0 * ap + 1.0;
        if (disc < 0.0) return false;
        spike_n_ = 0.5 * (4.0 * ap - 3.0 + std::sqrt(disc));
        if (spike_n_ <= 1.5) return false;  // need m in C^1 with m'(1) = 0
        // Total descent exactly 1/2: |p| (n+2+q1) / ((n+1)(n+2)) = 1/2.
        spike_q1_ = (spike_n_ + 1.0) * (spike_n_ + 2.0) / (2.0 * ap) - spike_n_ - 2.0;
        if (spike_q1_ < -1.0) return false;  // slope would change sign
        return true;
    }

    double spike_value(double s) const {
        const double ap = d_ - beta_;
        const double n = spike_n_, q1 = spike_q1_;
        double un1 = std::pow(1.0 - s, n + 1.0);
        double un2 = un1 * (1.0 - s);
        double int_base = (1.0 - un1) / (n + 1.0);
        double int_lin = (1.0 / (n + 1.0) - 1.0 / (n + 2.0)) - (un1 / (n + 1.0) - un2 / (n + 2.0));
        return 1.0 - ap * (int_base + q1 * int_lin);
    }

    double transition_value(double r) const {
        const double u = r - 1.0;
        if (kind_ == Transition::quintic) {
            double v = 0.0;
            for (int k = 5; k >= 0; --k) v = v * u + coef_[static_cast<std::size_t>(k)];
            return v;
        }
        if (kind_ == Transition::slope_spike) return spike_value(u);
        const double S = smoothstep(u);
        return std::exp((1.0 - S) * (beta_ - d_) * std::log(r) + S * std::log(0.5));
    }

    double transition_deriv(double r, int order) const {
        const double u = r - 1.0;
        if (kind_ == Transition::slope_spike) {
            const double ap = d_ - beta_;
            const double n = spike_n_, q1 = spike_q1_;
            double un = std::pow(1.0 - u, n);
            if (order == 1) return -ap * un * (1.0 + q1 * u);
            double un_1 = std::pow(1.0 - u, n - 1.0);
            return -ap * (-n * un_1 * (1.0 + q1 * u) + q1 * un);
        }
        if (kind_ == Transition::quintic) {
            if (order == 1) {
                double v = 0.0;
                for (int k = 5; k >= 1; --k) v = v * u + k * coef_[static_cast<std::size_t>(k)];
                return v;
            }
            double v = 0.0;
            for (int k = 5; k >= 2; --k)
                v = v * u + k * (k - 1) * coef_[static_cast<std::size_t>(k)];
            return v;
        }
        // log-blend: eta = exp(g), g = (1-S) p ln r + S ln(1/2).
        const double p = beta_ - d_;
        const double L = std::log(r);
        const double S = smoothstep(u), S1 = smoothstep_d1(u), S2 = smoothstep_d2(u);
        const double g = (1.0 - S) * p * L + S * std::log(0.5);
        const double g1 = -S1 * p * L + (1.0 - S) * p / r + S1 * std::log(0.5);
        const double g2 = -S2 * p * L - 2.0 * S1 * p / r - (1.0 - S) * p / (r * r) +
                          S2 * std::log(0.5);
        const double e = std::exp(g);
        if (order == 1) return e * g1;
        return e * (g2 + g1 * g1);
    }

    static double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
    static double smoothstep_d1(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
    static double smoothstep_d2(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

    bool transition_admissible() const {
        const int n = 2001;
        double prev = transition_value(1.0);
        for (int i = 1; i <= n; ++i) {
            double r = 1.0 + static_cast<double>(i) / n;
            double v = transition_value(r);
            if (v < 0.5 - 1e-12 || v > prev + 1e-12) return false;
            prev = v;
        }
        return true;
    }

    int d_;
    double alpha_;
    double beta_;
    double s_;
    Transition kind_;
    std::array<double, 6> coef_{};
    double spike_n_ = 0.0, spike_q1_ = 0.0;
};

}  // namespace fkl
