#pragma once

// Computation of e^{-t Lambda^eps}(x, y), Lambda^eps = (-Delta)^{alpha/2} - V_eps,
// by mutually checking methods:
//
//  * DuhamelSolver - meshfree Picard iteration of the Duhamel identity
//      q_t = p_t + int_0^t P_{t-tau} [ V_eps q_tau ] dtau
//    in the Legendre-sector representation around the source. The kernel is
//    held as q = p (+) C with the free part exact; only the correction C
//    lives on the radial grid, which removes the near-diagonal cancellation.
//    Long horizons are auto-split into windows via the semigroup property,
//    windows sized so the measured contraction stays below 1.
//
//  * evolve_trotter - Lie splitting u <- FreeStep_dt(exp(V_eps dt) u) with the
//    free step a multiplier e^{-dt |xi|^alpha} in the discrete Fourier domain
//    (FFTW, periodic box), initialized with the exact free kernel at t0.
//
//  * feynman_kac_mc (stable_mc.hpp) - path-integral oracle.
//
// RadialEvolver applies e^{-t Lambda^eps} to radial functions (the l = 0
// sector), which is what the L^1 desingularization and lower-bound checks
// consume.

#include <fftw3.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fkl/constants.hpp"
#include "fkl/free_kernel.hpp"
#include "fkl/kernel_table.hpp"
#include "fkl/legendre.hpp"
#include "fkl/parallel.hpp"
#include "fkl/stable_mc.hpp"

namespace fkl {

struct PropagatorConfig {
    // Trotter (FFT box) settings.
    double box_halfwidth = 0.0;  // 0 = derive from the box rule
    int grid_n = 128;            // points per axis, power of two
    double dt = 0.01;
    double t0 = 0.0;  // initial smoothing time, 0 = dt
    double tail_factor = 2.4;

    // Duhamel sector solver settings.
    int n_tau = 16;      // time intervals per window
    int n_radial = 96;   // base log-spaced radial nodes
    int lmax = 32;       // Legendre sectors (adaptive cap)
    double window_v_budget = 3.0;  // window <= budget / sup V_eps
    int k_max = 60;
    double picard_tol = 1e-5;
    int force_windows = 0;  // 0 = size windows from sup V_eps

    std::vector<double> eps_schedule{0.1, 0.03, 0.01};
    std::uint64_t seed = 77;

    void validate_box(double t, double alpha) const {
        double L = box_halfwidth;
        if (L > 0.0 && L < 4.0 * std::pow(t, 1.0 / alpha) * tail_factor)
            throw std::domain_error("PropagatorConfig: box halfwidth below the box rule");
        if ((grid_n & (grid_n - 1)) != 0)
            throw std::domain_error("PropagatorConfig: grid_n must be a power of two");
        double t_init = t0 > 0.0 ? t0 : dt;
        if (dt > t_init + 1e-15)
            throw std::domain_error("PropagatorConfig: dt must not exceed t0");
    }
};


namespace detail {
// Block-by-block Volterra weights on uniform nodes 0..ip: composite Simpson
// when ip is even; Simpson plus a trailing trapezoid panel when odd.
inline double tau_weight(int i, int ip, double h) {
    if (ip == 1) return 0.5 * h;
    double w = 0.0;
    int simpson_end = (ip % 2 == 0) ? ip : ip - 1;
    if (i <= simpson_end) {
        if (i == 0 || i == simpson_end)
            w += h / 3.0;
        else
            w += (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
    }
    if (ip % 2 == 1 && (i == ip - 1 || i == ip)) w += 0.5 * h;
    return w;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Duhamel sector solver
// ---------------------------------------------------------------------------

/// Bank of angular quadrature grids bucketed by boundary-layer decade, so
/// each radius pair integrates only as deep into u = 1 as it needs.
class AngularGridBank {
  public:
    AngularGridBank() {
        for (int k = 0; k <= 13; ++k)
            grids_.emplace_back(std::pow(10.0, -static_cast<double>(k)), 6, 4);
    }
    const AngularGrid& pick(double layer) const {
        double lg = -std::log10(std::max(std::min(layer, 1.0), 1e-13));
        int k = std::clamp(static_cast<int>(std::ceil(lg)), 0, 13);
        return grids_[static_cast<std::size_t>(k)];
    }

  private:
    std::vector<AngularGrid> grids_;
};

/// Everything eps-independent a Duhamel solve needs: the radial grid, the
/// free sector kernels for the window gaps, and the source-rooted free
/// sectors per window node. Shareable across an eps schedule.
struct DuhamelTables {
    double t = 0.0, r_x = 0.0, alpha = 1.0;
    int n_tau = 0, lmax = 0, n_windows = 1;
    double window = 0.0;
    std::vector<double> rho, w;
    std::map<double, std::size_t> node_of;
    std::vector<double> gap;  // [gap k][l][i][j]
    std::vector<std::vector<std::vector<double>>> pfree;  // [window][node][l*nr+j]

    const double* gap_at(int k, int l) const {
        const std::size_t nr = rho.size();
        return gap.data() +
               ((static_cast<std::size_t>(k - 1) * (lmax + 1) + l) * nr) * nr;
    }

    static std::shared_ptr<const DuhamelTables> build(
        const DerivedConstants& c, double t, double source_radius,
        const std::vector<double>& targets, const PropagatorConfig& cfg, int n_windows,
        const FreeKernelProfile& profile) {
        auto tb = std::make_shared<DuhamelTables>();
        DuhamelTables& T = *tb;
        const double alpha = c.params.alpha;
        const double scale = std::pow(t, 1.0 / alpha);
        T.t = t;
        T.r_x = source_radius;
        T.alpha = alpha;
        T.n_tau = cfg.n_tau;
        T.n_windows = n_windows;
        T.window = t / n_windows;

        // --- radial grid: log base + source cluster + exact target nodes ---
        double eps_floor = cfg.eps_schedule.empty()
                               ? 1e-2
                               : *std::min_element(cfg.eps_schedule.begin(),
                                                   cfg.eps_schedule.end());
        double r_lo = std::min({0.25 * source_radius, 0.02 * scale,
                                0.25 * std::sqrt(eps_floor)});
        r_lo = std::max(r_lo, 1e-5);
        double r_hi = std::max({24.0 * scale, 3.0 * source_radius, 8.0});
        if (!targets.empty())
            r_hi = std::max(r_hi, 2.0 * *std::max_element(targets.begin(), targets.end()));
        std::vector<double> nodes;
        for (int i = 0; i <= cfg.n_radial; ++i)
            nodes.push_back(r_lo *
                            std::pow(r_hi / r_lo, static_cast<double>(i) / cfg.n_radial));
        // Cluster around the source resolves the early-time spike of the
        // transported V*p term, width ~ (window/n_tau)^{1/alpha}.
        double width = std::pow(T.window / cfg.n_tau, 1.0 / alpha);
        double halfspan = std::min(6.0 * width, 0.9 * source_radius);
        for (int i = -24; i <= 24; ++i) {
            double r = source_radius + halfspan * i / 24.0;
            if (r > r_lo && r < r_hi) nodes.push_back(r);
        }
        for (double rt : targets)
            if (rt > 0.0) nodes.push_back(rt);
        nodes.push_back(source_radius);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                    nodes.end());
        T.rho = nodes;
        const std::size_t nr = T.rho.size();
        T.w.assign(nr, 0.0);
        for (std::size_t j = 0; j < nr; ++j) {
            double lo = j == 0 ? T.rho[0] : 0.5 * (T.rho[j - 1] + T.rho[j]);
            double hi = j + 1 == nr ? T.rho.back() : 0.5 * (T.rho[j] + T.rho[j + 1]);
            T.w[j] = T.rho[j] * T.rho[j] * (hi - lo);
        }
        for (double rt : targets) {
            auto it = std::lower_bound(T.rho.begin(), T.rho.end(), rt - 1e-12);
            T.node_of[rt] = static_cast<std::size_t>(it - T.rho.begin());
        }

        // Sector cap: resolve the smallest angular feature the targets need.
        double r_need = source_radius;
        if (!targets.empty())
            r_need = std::max(r_need, *std::max_element(targets.begin(), targets.end()));
        int need = static_cast<int>(std::ceil(6.0 + 2.0 * r_need / scale));
        T.lmax = std::min(cfg.lmax, std::max(8, need));

        // --- sector kernels for the window gaps ------------------------------
        AngularGridBank bank;
        const int nt = cfg.n_tau;
        T.gap.assign(static_cast<std::size_t>(nt) * (T.lmax + 1) * nr * nr, 0.0);
        double h = T.window / nt;
        for (int k = 1; k <= nt; ++k) {
            double g = h * k;
            double jac = std::pow(g, -3.0 / alpha);
            double isc = std::pow(g, -1.0 / alpha);
            double wid2 = std::pow(g, 2.0 / alpha);
            auto kernel = [&](double dist) { return jac * profile.p1(isc * dist); };
            double* base = tb->gap.data() +
                           (static_cast<std::size_t>(k - 1) * (T.lmax + 1)) * nr * nr;
            parallel_for(0, nr, [&](std::size_t i) {
                std::vector<double> coef(static_cast<std::size_t>(T.lmax) + 1);
                for (std::size_t j = i; j < nr; ++j) {
                    double layer = wid2 / (2.0 * T.rho[i] * T.rho[j]);
                    sector_project(kernel, T.rho[i], T.rho[j], T.lmax, bank.pick(layer),
                                   coef.data());
                    for (int l = 0; l <= T.lmax; ++l) {
                        base[static_cast<std::size_t>(l) * nr * nr + i * nr + j] =
                            coef[static_cast<std::size_t>(l)];
                        base[static_cast<std::size_t>(l) * nr * nr + j * nr + i] =
                            coef[static_cast<std::size_t>(l)];
                    }
                }
            });
        }

        // --- source-rooted free sectors per window node ----------------------
        T.pfree.assign(static_cast<std::size_t>(n_windows),
                       std::vector<std::vector<double>>(static_cast<std::size_t>(nt) + 1));
        for (int m = 0; m < n_windows; ++m) {
            for (int i = 0; i <= nt; ++i) {
                auto& out = T.pfree[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
                out.assign(static_cast<std::size_t>(T.lmax + 1) * nr, 0.0);
                if (m == 0 && i == 0) continue;  // the delta start is analytic
                double Tt = m * T.window + h * i;
                double jac = std::pow(Tt, -3.0 / alpha);
                double isc = std::pow(Tt, -1.0 / alpha);
                double wid2 = std::pow(Tt, 2.0 / alpha);
                auto kernel = [&](double dist) { return jac * profile.p1(isc * dist); };
                parallel_for(0, nr, [&](std::size_t j) {
                    std::vector<double> coef(static_cast<std::size_t>(T.lmax) + 1);
                    double layer = wid2 / (2.0 * source_radius * T.rho[j]);
                    sector_project(kernel, source_radius, T.rho[j], T.lmax,
                                   bank.pick(layer), coef.data());
                    for (int l = 0; l <= T.lmax; ++l)
                        out[static_cast<std::size_t>(l) * nr + j] =
                            coef[static_cast<std::size_t>(l)];
                });
            }
        }
        return tb;
    }
};

class DuhamelSolver {
  public:
    DuhamelSolver(const DerivedConstants& c, double eps, double t, double source_radius,
                  std::vector<double> target_radii, const PropagatorConfig& cfg,
                  std::shared_ptr<const FreeKernelProfile> profile = nullptr,
                  std::shared_ptr<const DuhamelTables> tables = nullptr)
        : c_(c),
          eps_(eps),
          t_(t),
          r_x_(source_radius),
          targets_(std::move(target_radii)),
          cfg_(cfg),
          profile_ptr_(profile ? std::move(profile)
                               : std::make_shared<FreeKernelProfile>(c.params.d,
                                                                     c.params.alpha)),
          profile_(*profile_ptr_) {
        if (!(t > 0.0)) throw std::domain_error("DuhamelSolver: t > 0 required");
        if (!(source_radius > 0.0))
            throw std::domain_error("DuhamelSolver: source must avoid the origin");
        alpha_ = c.params.alpha;
        scale_ = std::pow(t_, 1.0 / alpha_);
        if (c.params.delta > 0.0 && !(eps > 0.0))
            throw std::domain_error("DuhamelSolver: regularized potential (eps > 0) required");
        sup_v_ = c_.params.delta == 0.0
                     ? 0.0
                     : c_.params.delta * c_.hardy_sharp * std::pow(eps_, -0.5 * alpha_);
        if (tables) {
            if (std::abs(tables->t - t) > 1e-12 || std::abs(tables->r_x - source_radius) > 1e-12)
                throw std::domain_error("DuhamelSolver: shared tables built for another solve");
            tables_ = std::move(tables);
        } else {
            int n_windows = cfg_.force_windows > 0
                                ? cfg_.force_windows
                                : std::max<int>(1, static_cast<int>(std::ceil(
                                                       t_ * sup_v_ / cfg_.window_v_budget)));
            tables_ = DuhamelTables::build(c_, t_, r_x_, targets_, cfg_, n_windows,
                                           profile_);
        }
        if (t_ * sup_v_ / tables_->n_windows > 2.0 * cfg_.window_v_budget)
            throw std::domain_error("DuhamelSolver: shared tables have too few windows");
        v_.resize(tables_->rho.size());
        for (std::size_t j = 0; j < v_.size(); ++j)
            v_[j] = c_.params.delta == 0.0 ? 0.0 : c_.potential_eps(tables_->rho[j], eps_);
        solve();
    }

    /// q_t(x, y) for |y| = target_radius, angle(x, y) = theta.
    double eval(double target_radius, double theta) const {
        double ct = std::cos(theta);
        double dist2 = r_x_ * r_x_ + target_radius * target_radius -
                       2.0 * r_x_ * target_radius * ct;
        double free_part = profile_.value(t_, dist2 > 0.0 ? std::sqrt(dist2) : 0.0);
        auto it = tables_->node_of.find(target_radius);
        if (it == tables_->node_of.end())
            throw std::domain_error("DuhamelSolver: target radius not in evaluation grid");
        std::size_t j = it->second;
        const std::size_t nr = tables_->rho.size();
        std::vector<double> coef(static_cast<std::size_t>(tables_->lmax) + 1);
        for (int l = 0; l <= tables_->lmax; ++l)
            coef[static_cast<std::size_t>(l)] = C_[static_cast<std::size_t>(l) * nr + j];
        return free_part + sector_sum(coef.data(), tables_->lmax, ct);
    }

    /// Total mass <q_t(x, .)> by grid quadrature with a power-tail closure.
    double mass() const {
        const std::size_t nr = tables_->rho.size();
        double m = 1.0;  // the free part integrates to one exactly
        for (std::size_t j = 0; j < nr; ++j) m += tables_->w[j] * C_[j];
        m += C_[nr - 1] * std::pow(tables_->rho.back(), 3.0) / alpha_;
        return m;
    }

    double measured_contraction() const { return measured_contraction_; }
    int windows() const { return tables_->n_windows; }
    int iterations_last_window() const { return iter_last_; }
    double sup_v() const { return sup_v_; }
    std::shared_ptr<const DuhamelTables> tables() const { return tables_; }
    std::shared_ptr<const FreeKernelProfile> profile() const { return profile_ptr_; }
    /// L^1 norm of the l=0 correction after each Picard iteration of the
    /// first window; the Duhamel terms are nonnegative, so this is monotone.
    const std::vector<double>& first_window_iteration_norms() const {
        return iter_norms_;
    }

  private:
    void solve() {
        const std::size_t nr = tables_->rho.size();
        const int nt = tables_->n_tau;
        const int lmax = tables_->lmax;
        const double h = tables_->window / nt;
        C_.assign(static_cast<std::size_t>(lmax + 1) * nr, 0.0);
        std::vector<std::vector<double>> U(static_cast<std::size_t>(nt) + 1), U_next;
        measured_contraction_ = 0.0;

        for (int m = 0; m < tables_->n_windows; ++m) {
            const auto& pfree = tables_->pfree[static_cast<std::size_t>(m)];
            for (int i = 0; i <= nt; ++i) U[static_cast<std::size_t>(i)] = C_;
            double prev_change = -1.0;
            int k = 0;
            for (; k < cfg_.k_max; ++k) {
                double change = picard_sweep(U, U_next, pfree, m == 0, h);
                std::swap(U, U_next);
                if (m == 0) {
                    const std::vector<double>& end = U[static_cast<std::size_t>(nt)];
                    double nrm = 0.0;
                    for (std::size_t j = 0; j < nr; ++j) nrm += tables_->w[j] * end[j];
                    iter_norms_.push_back(nrm);
                }
                if (prev_change > 0.0 && prev_change > 1e-300)
                    measured_contraction_ = std::max(measured_contraction_,
                                                     change / prev_change);
                prev_change = change;
                if (change < cfg_.picard_tol) break;
            }
            iter_last_ = k + 1;
            if (k == cfg_.k_max)
                throw std::runtime_error(
                    "DuhamelSolver: Picard did not contract (measured factor " +
                    std::to_string(measured_contraction_) + ")");
            C_ = U[static_cast<std::size_t>(nt)];
        }
    }

    // One Picard sweep over the window; returns the sup-norm-relative change
    // of the end-of-window correction. Organized per gap so each kernel
    // matrix streams through one GEMM.
    double picard_sweep(const std::vector<std::vector<double>>& U,
                        std::vector<std::vector<double>>& U_next,
                        const std::vector<std::vector<double>>& pfree, bool first_window,
                        double h) {
        const std::size_t nr = tables_->rho.size();
        const int nt = tables_->n_tau;
        const int lmax = tables_->lmax;
        U_next.assign(static_cast<std::size_t>(nt) + 1, C_);
        for (int ip = 1; ip <= nt; ++ip)
            std::fill(U_next[static_cast<std::size_t>(ip)].begin(),
                      U_next[static_cast<std::size_t>(ip)].end(), 0.0);

        // integrand_i = V o (pfree_i + U_i), measure weights folded in.
        std::vector<std::vector<double>> vu(static_cast<std::size_t>(nt) + 1);
        for (int i = 0; i <= nt; ++i) {
            vu[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(lmax + 1) * nr);
            for (int l = 0; l <= lmax; ++l)
                for (std::size_t j = 0; j < nr; ++j) {
                    std::size_t id = static_cast<std::size_t>(l) * nr + j;
                    vu[static_cast<std::size_t>(i)][id] =
                        v_[j] * (pfree[static_cast<std::size_t>(i)][id] +
                                 U[static_cast<std::size_t>(i)][id]) * tables_->w[j];
                }
        }
        const double v_src = (c_.params.delta > 0.0) ? c_.potential_eps(r_x_, eps_) : 0.0;
        parallel_for(0, static_cast<std::size_t>(lmax + 1), [&](std::size_t l) {
            using Mat = Eigen::MatrixXd;
            Mat S(nr, static_cast<std::size_t>(nt) + 1);
            for (int g = 1; g <= nt; ++g) {
                int ncols = nt - g + 1;  // sources i = 0 .. nt-g
                for (int i = 0; i < ncols; ++i)
                    S.col(i) = Eigen::Map<const Eigen::VectorXd>(
                        vu[static_cast<std::size_t>(i)].data() + l * nr, nr);
                for (std::size_t j = 0; j < nr; ++j)
                    S(j, ncols) = C_[l * nr + j] * tables_->w[j];
                Eigen::Map<const Mat> P(tables_->gap_at(g, static_cast<int>(l)), nr, nr);
                Mat R = P * S.leftCols(ncols + 1);
                for (int i = 0; i < ncols; ++i) {
                    int ip = i + g;
                    if (first_window && i == 0) continue;  // replaced by the delta term
                    Eigen::Map<Eigen::VectorXd> out(
                        U_next[static_cast<std::size_t>(ip)].data() + l * nr, nr);
                    out += detail::tau_weight(i, ip, h) * R.col(i);
                }
                Eigen::Map<Eigen::VectorXd> outg(
                    U_next[static_cast<std::size_t>(g)].data() + l * nr, nr);
                outg += R.col(ncols);  // transported start-of-window correction
            }
            for (int ip = 1; ip <= nt; ++ip) {
                double* out = U_next[static_cast<std::size_t>(ip)].data() + l * nr;
                const double* ue = U[static_cast<std::size_t>(ip)].data() + l * nr;
                const double* pe = pfree[static_cast<std::size_t>(ip)].data() + l * nr;
                double we = detail::tau_weight(ip, ip, h);
                double w0 = detail::tau_weight(0, ip, h);
                for (std::size_t j = 0; j < nr; ++j) {
                    out[j] += we * v_[j] * (pe[j] + ue[j]);
                    if (first_window) out[j] += w0 * v_src * pe[j];
                }
            }
        });
        double worst = 0.0;
        const auto& out = U_next[static_cast<std::size_t>(nt)];
        double scale = 1e-300;
        for (double vv : out) scale = std::max(scale, std::abs(vv));
        for (std::size_t id = 0; id < out.size(); ++id)
            worst = std::max(
                worst, std::abs(out[id] - U[static_cast<std::size_t>(nt)][id]) / scale);
        return worst;
    }

    DerivedConstants c_;
    double eps_;
    double t_;
    double r_x_;
    std::vector<double> targets_;
    PropagatorConfig cfg_;
    std::shared_ptr<const FreeKernelProfile> profile_ptr_;
    const FreeKernelProfile& profile_;
    std::shared_ptr<const DuhamelTables> tables_;
    double alpha_ = 1.0, scale_ = 1.0, sup_v_ = 0.0;
    int iter_last_ = 0;
    double measured_contraction_ = 0.0;
    std::vector<double> v_;
    std::vector<double> C_;  // correction sectors at the current window start
    std::vector<double> iter_norms_;
};

/// Single-pair spec entry point: q_t(x,y) by the Picard iteration.
inline double duhamel_picard(double source_radius, double target_radius, double angle,
                             double t, const DerivedConstants& c, double eps,
                             const PropagatorConfig& cfg, int k_max = 0) {
    PropagatorConfig local = cfg;
    if (k_max > 0) local.k_max = k_max;
    DuhamelSolver solver(c, eps, t, source_radius, {target_radius}, local);
    return solver.eval(target_radius, angle);
}

// ---------------------------------------------------------------------------
// Radial evolver (l = 0 sector): u(t) = e^{-t Lambda^eps} u0 for radial u0.
// ---------------------------------------------------------------------------

class RadialEvolver {
  public:
    /// u0 = offset + decaying part given by `fn` (fn includes the offset; the
    /// offset is transported analytically since the free semigroup preserves
    /// constants).
    RadialEvolver(const DerivedConstants& c, double eps, double t,
                  const std::function<double(double)>& u0, double offset,
                  const PropagatorConfig& cfg,
                  std::shared_ptr<const FreeKernelProfile> profile = nullptr)
        : c_(c), eps_(eps), t_(t), offset_(offset), cfg_(cfg),
          profile_ptr_(profile ? std::move(profile)
                               : std::make_shared<FreeKernelProfile>(c.params.d,
                                                                     c.params.alpha)),
          profile_(*profile_ptr_) {
        alpha_ = c.params.alpha;
        if (c.params.delta > 0.0 && !(eps > 0.0))
            throw std::domain_error("RadialEvolver: regularized potential (eps > 0) required");
        double sup_v = c.params.delta == 0.0
                           ? 0.0
                           : c.params.delta * c.hardy_sharp * std::pow(eps, -0.5 * alpha_);
        n_windows_ = std::max<int>(1, static_cast<int>(std::ceil(
                                          t * sup_v / cfg.window_v_budget)));
        window_ = t / n_windows_;
        build_grid();
        u_.resize(rho_.size());
        for (std::size_t j = 0; j < rho_.size(); ++j) u_[j] = u0(rho_[j]);
        evolve();
    }

    const std::vector<double>& radii() const { return rho_; }
    const std::vector<double>& values() const { return u_; }

    double value_at(double r) const {
        auto it = std::lower_bound(rho_.begin(), rho_.end(), r);
        std::size_t j = std::min<std::size_t>(
            std::max<std::ptrdiff_t>(1, it - rho_.begin()), rho_.size() - 1);
        double x0 = rho_[j - 1], x1 = rho_[j];
        double f = (r - x0) / (x1 - x0);
        return (1.0 - f) * u_[j - 1] + f * u_[j];
    }

    /// <w . u> = 4 pi int w(r) u(r) r^2 dr with a power-tail closure for the
    /// decaying part (the offset contributes only through w's own decay).
    double integrate_against(const std::function<double(double)>& weight) const {
        double s = 0.0;
        for (std::size_t j = 0; j < rho_.size(); ++j)
            s += w_[j] * weight(rho_[j]) * (u_[j] - offset_evolved(rho_[j]));
        std::size_t last = rho_.size() - 1;
        s += (u_[last] - offset_evolved(rho_[last])) * weight(rho_[last]) *
             std::pow(rho_[last], 3.0) / alpha_;
        if (offset_ != 0.0)
            throw std::domain_error("integrate_against: offset part is not integrable");
        return 4.0 * M_PI * s;
    }

  private:
    double offset_evolved(double) const { return 0.0; }  // tracked inside u_

    void build_grid() {
        double scale = std::pow(t_, 1.0 / alpha_);
        double r_lo = std::max(std::min(0.02 * scale, 0.25 * std::sqrt(eps_)), 1e-5);
        double r_hi = std::max(48.0 * scale, 24.0);
        int n = std::max(2 * cfg_.n_radial + 96, 280);
        rho_.clear();
        for (int i = 0; i <= n; ++i)
            rho_.push_back(r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / n));
        w_.assign(rho_.size(), 0.0);
        for (std::size_t j = 0; j < rho_.size(); ++j) {
            double lo = j == 0 ? rho_[0] : 0.5 * (rho_[j - 1] + rho_[j]);
            double hi = j + 1 == rho_.size() ? rho_.back() : 0.5 * (rho_[j] + rho_[j + 1]);
            w_[j] = rho_[j] * rho_[j] * (hi - lo);
        }
        v_.resize(rho_.size());
        for (std::size_t j = 0; j < rho_.size(); ++j)
            v_[j] = c_.potential_eps(rho_[j], eps_);
    }

    // l = 0 sector kernels for the window gaps.
    void build_gap_tables() {
        const std::size_t nr = rho_.size();
        const int nt = cfg_.n_tau;
        gap0_.assign(static_cast<std::size_t>(nt) * nr * nr, 0.0);
        double h = window_ / nt;
        for (int k = 1; k <= nt; ++k) {
            double g = h * k;
            double layer = std::pow(g, 2.0 / alpha_) / (2.0 * rho_.back() * rho_.back());
            AngularGrid agrid(layer, 6, 4);
            auto kernel = [&](double dist) { return profile_.value(g, dist); };
            double* table = gap0_.data() + static_cast<std::size_t>(k - 1) * nr * nr;
            parallel_for(0, nr, [&](std::size_t i) {
                double coef[1];
                for (std::size_t j = i; j < nr; ++j) {
                    sector_project(kernel, rho_[i], rho_[j], 0, agrid, coef);
                    table[i * nr + j] = coef[0];
                    table[j * nr + i] = coef[0];
                }
            });
        }
    }

    void evolve() {
        build_gap_tables();
        const std::size_t nr = rho_.size();
        const int nt = cfg_.n_tau;
        const double h = window_ / nt;
        std::vector<std::vector<double>> U(nt + 1), U_next;
        for (int m = 0; m < n_windows_; ++m) {
            for (int i = 0; i <= nt; ++i) U[static_cast<std::size_t>(i)] = u_;
            double change = 1e300;
            for (int k = 0; k < cfg_.k_max && change > cfg_.picard_tol; ++k) {
                change = sweep(U, U_next, h);
                std::swap(U, U_next);
            }
            u_ = U[static_cast<std::size_t>(nt)];
        }
    }

    double sweep(const std::vector<std::vector<double>>& U,
                 std::vector<std::vector<double>>& U_next, double h) {
        const std::size_t nr = rho_.size();
        const int nt = cfg_.n_tau;
        U_next.assign(static_cast<std::size_t>(nt) + 1, u_);
        using Mat = Eigen::MatrixXd;
        Mat S(nr, static_cast<std::size_t>(nt) + 1);
        for (int i = 0; i <= nt; ++i)
            for (std::size_t j = 0; j < nr; ++j)
                S(j, i) = v_[j] * U[static_cast<std::size_t>(i)][j] * w_[j];
        Eigen::VectorXd start(nr);
        for (std::size_t j = 0; j < nr; ++j) start(j) = (u_[j] - offset_) * w_[j];

        std::vector<Eigen::VectorXd> acc(static_cast<std::size_t>(nt) + 1,
                                         Eigen::VectorXd::Constant(nr, offset_));
        for (int g = 1; g <= nt; ++g) {
            Eigen::Map<const Mat> P(gap0_.data() + static_cast<std::size_t>(g - 1) * nr * nr,
                                    nr, nr);
            int ncols = nt - g + 1;
            Mat R(nr, ncols + 1);
            R.leftCols(ncols) = P * S.leftCols(ncols);
            R.col(ncols) = P * start;
            for (int i = 0; i < ncols; ++i) {
                int ip = i + g;
                acc[static_cast<std::size_t>(ip)] +=
                    detail::tau_weight(i, ip, h) * R.col(i);
            }
            acc[static_cast<std::size_t>(g)] += R.col(ncols);  // free transport
        }
        double worst = 0.0;
        for (int ip = 1; ip <= nt; ++ip) {
            const std::vector<double>& ue = U[static_cast<std::size_t>(ip)];
            double we = detail::tau_weight(ip, ip, h);
            auto& out = U_next[static_cast<std::size_t>(ip)];
            for (std::size_t j = 0; j < nr; ++j)
                out[j] = acc[static_cast<std::size_t>(ip)](j) + we * v_[j] * ue[j];
            if (ip == nt) {
                double scale = 1e-300;
                for (double vv : out) scale = std::max(scale, std::abs(vv));
                for (std::size_t j = 0; j < nr; ++j)
                    worst = std::max(worst, std::abs(out[j] - ue[j]) / scale);
            }
        }
        return worst;
    }

    DerivedConstants c_;
    double eps_, t_, offset_;
    PropagatorConfig cfg_;
    std::shared_ptr<const FreeKernelProfile> profile_ptr_;
    const FreeKernelProfile& profile_;
    double alpha_ = 1.0, window_ = 0.0;
    int n_windows_ = 1;
    std::vector<double> rho_, w_, v_, u_;
    std::vector<double> gap0_;
};

// ---------------------------------------------------------------------------
// Trotter splitting on a periodic FFT box
// ---------------------------------------------------------------------------

struct TrotterResult {
    KernelTable table;
    double final_mass = 0.0;
    double leakage_estimate = 0.0;
};

/// Lie-split propagation from a source at radius `source_radius` (placed on
/// the z axis, snapped to the grid). Targets are sampled trilinearly.
inline TrotterResult evolve_trotter(const DerivedConstants& c, double eps,
                                    double source_radius, double t,
                                    const std::vector<double>& target_radii,
                                    const std::vector<double>& angles,
                                    const PropagatorConfig& cfg) {
    const double alpha = c.params.alpha;
    double L = cfg.box_halfwidth > 0.0
                   ? cfg.box_halfwidth
                   : 4.0 * std::pow(t, 1.0 / alpha) * cfg.tail_factor;
    PropagatorConfig checked = cfg;
    checked.box_halfwidth = L;
    checked.validate_box(t, alpha);
    const int N = cfg.grid_n;
    const double cell = 2.0 * L / N;
    const double t0 = cfg.t0 > 0.0 ? cfg.t0 : cfg.dt;
    if (c.params.delta > 0.0 && eps < cell * cell)
        throw std::domain_error("evolve_trotter: eps below cell^2 is unresolved");

    // Snap the source to the nearest grid point on the z axis.
    int src_k = static_cast<int>(std::lround(source_radius / cell));
    double src_z = src_k * cell;
    if (std::abs(src_z) < 0.5 * cell && source_radius > 0.0) src_z = cell;

    const std::size_t n3 = static_cast<std::size_t>(N) * N * N;
    std::vector<std::complex<double>> u(n3);
    FreeKernelProfile profile(c.params.d, alpha);

    auto coord = [&](int i) { return -L + cell * i; };
    std::vector<double> freq0(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        int k = i <= N / 2 ? i : i - N;
        freq0[static_cast<std::size_t>(i)] = M_PI / L * k;
    }
    // u(t0) = free kernel from the source in its band-limited representation:
    // filling e^{-t0 |xi|^alpha - i xi.x_src} on the discrete frequencies and
    // transforming back is alias-free and carries exactly unit mass, which a
    // pointwise sample of the near-singular kernel does not.
    parallel_for(0, static_cast<std::size_t>(N), [&](std::size_t ix) {
        for (int iy = 0; iy < N; ++iy)
            for (int iz = 0; iz < N; ++iz) {
                double fx = freq0[ix], fy = freq0[static_cast<std::size_t>(iy)],
                       fz = freq0[static_cast<std::size_t>(iz)];
                double k2 = fx * fx + fy * fy + fz * fz;
                double amp = std::exp(-t0 * std::pow(k2, 0.5 * alpha)) /
                             std::pow(2.0 * L, 3.0);
                // physical coordinates are centred: shift the DFT origin by L
                // on each axis, plus the source offset on the z axis
                double phase = -(fx + fy + fz) * L - fz * src_z;
                u[(ix * N + iy) * N + iz] =
                    std::complex<double>(amp * std::cos(phase), amp * std::sin(phase));
            }
    });
    {
        fftw_plan init = fftw_plan_dft_3d(N, N, N, reinterpret_cast<fftw_complex*>(u.data()),
                                          reinterpret_cast<fftw_complex*>(u.data()),
                                          FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(init);
        fftw_destroy_plan(init);
    }

    // Potential factor and Fourier multiplier.
    std::vector<double> vfac(n3, 1.0);
    if (c.params.delta > 0.0)
        parallel_for(0, static_cast<std::size_t>(N), [&](std::size_t ix) {
            double x0 = coord(static_cast<int>(ix));
            for (int iy = 0; iy < N; ++iy) {
                double y0 = coord(iy);
                for (int iz = 0; iz < N; ++iz) {
                    double z0 = coord(iz);
                    double r = std::sqrt(x0 * x0 + y0 * y0 + z0 * z0);
                    vfac[(ix * N + iy) * N + iz] =
                        std::exp(cfg.dt * c.potential_eps(r, eps));
                }
            }
        });
    std::vector<double> freq(N);
    for (int i = 0; i < N; ++i) {
        int k = i <= N / 2 ? i : i - N;
        freq[static_cast<std::size_t>(i)] = M_PI / L * k;
    }
    std::vector<double> mult(n3);
    parallel_for(0, static_cast<std::size_t>(N), [&](std::size_t ix) {
        for (int iy = 0; iy < N; ++iy)
            for (int iz = 0; iz < N; ++iz) {
                double k2 = freq[ix] * freq[ix] + freq[iy] * freq[iy] + freq[iz] * freq[iz];
                mult[(ix * N + iy) * N + iz] =
                    std::exp(-cfg.dt * std::pow(k2, 0.5 * alpha)) / static_cast<double>(n3);
            }
    });

    fftw_plan fwd = fftw_plan_dft_3d(N, N, N, reinterpret_cast<fftw_complex*>(u.data()),
                                     reinterpret_cast<fftw_complex*>(u.data()),
                                     FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_3d(N, N, N, reinterpret_cast<fftw_complex*>(u.data()),
                                     reinterpret_cast<fftw_complex*>(u.data()),
                                     FFTW_BACKWARD, FFTW_ESTIMATE);

    const double cellvol = cell * cell * cell;
    const double sup_v = eps > 0.0
                             ? c.params.delta * c.hardy_sharp * std::pow(eps, -0.5 * alpha)
                             : c.potential_eps(cell, 0.0);
    int steps = static_cast<int>(std::lround((t - t0) / cfg.dt));
    for (int s = 0; s < steps; ++s) {
        parallel_for(0, n3, [&](std::size_t i) { u[i] *= vfac[i]; });
        fftw_execute(fwd);
        parallel_for(0, n3, [&](std::size_t i) { u[i] *= mult[i]; });
        fftw_execute(bwd);
        double mass = 0.0;
        for (std::size_t i = 0; i < n3; ++i) mass += u[i].real();
        mass *= cellvol;
        double bound = 1.05 * std::exp((t0 + (s + 1) * cfg.dt) * sup_v);
        if (mass > bound) {
            fftw_destroy_plan(fwd);
            fftw_destroy_plan(bwd);
            throw std::runtime_error("evolve_trotter: mass inflation guard tripped");
        }
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);

    TrotterResult out;
    double mass = 0.0;
    for (std::size_t i = 0; i < n3; ++i) mass += u[i].real();
    out.final_mass = mass * cellvol;

    auto sample = [&](double px, double py, double pz) {
        double fx = (px + L) / cell, fy = (py + L) / cell, fz = (pz + L) / cell;
        int ix = std::clamp(static_cast<int>(fx), 0, N - 2);
        int iy = std::clamp(static_cast<int>(fy), 0, N - 2);
        int iz = std::clamp(static_cast<int>(fz), 0, N - 2);
        double ax = fx - ix, ay = fy - iy, az = fz - iz;
        double acc = 0.0;
        for (int dx = 0; dx <= 1; ++dx)
            for (int dy = 0; dy <= 1; ++dy)
                for (int dz = 0; dz <= 1; ++dz) {
                    double wgt = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay) *
                                 (dz ? az : 1.0 - az);
                    acc += wgt *
                           u[((static_cast<std::size_t>(ix + dx) * N) + (iy + dy)) * N +
                             (iz + dz)]
                               .real();
                }
        return acc;
    };

    KernelTable& tab = out.table;
    tab.method = "trotter";
    tab.params = c.params;
    tab.params.eps = eps;
    tab.t_values = {t};
    tab.source_radii = {src_z};
    tab.target_radii = target_radii;
    tab.angles = angles;
    tab.seed = cfg.seed;
    tab.values.resize(tab.expected_size());
    for (std::size_t iy = 0; iy < target_radii.size(); ++iy)
        for (std::size_t ia = 0; ia < angles.size(); ++ia) {
            double r = target_radii[iy], th = angles[ia];
            tab.at(0, 0, iy, ia) = sample(r * std::sin(th), 0.0, r * std::cos(th));
        }
    // Wrap-around proxy: the six nearest periodic images of the source seen
    // from the farthest sampled target.
    double rmax_t = target_radii.empty()
                        ? 0.0
                        : *std::max_element(target_radii.begin(), target_radii.end());
    double img = std::max(2.0 * L - std::abs(src_z) - rmax_t, L);
    out.leakage_estimate = 6.0 * profile.value(t, img) * std::exp(t * sup_v);
    tab.error_estimate = out.leakage_estimate;
    return out;
}

// ---------------------------------------------------------------------------
// eps -> 0 limit
// ---------------------------------------------------------------------------

struct EpsLimitResult {
    KernelTable table;                 // extrapolated Lambda-kernel approximation
    double max_monotonicity_violation = 0.0;
    double extrapolation_residual = 0.0;
};

/// Monotone-in-eps check plus Richardson-style extrapolation of >= 3 tables
/// computed on the same grid with decreasing eps.
inline EpsLimitResult eps_limit(const std::vector<KernelTable>& tables,
                                double noise_floor = 1e-4) {
    if (tables.size() < 3)
        throw std::domain_error("eps_limit: need at least 3 decreasing-eps tables");
    for (std::size_t k = 1; k < tables.size(); ++k) {
        if (!(tables[k].params.eps < tables[k - 1].params.eps))
            throw std::domain_error("eps_limit: eps schedule must decrease");
        if (tables[k].values.size() != tables[0].values.size())
            throw std::domain_error("eps_limit: tables must share one grid");
    }
    EpsLimitResult out;
    out.table = tables.back();
    out.table.method = "eps_limit";
    out.table.params.eps = 0.0;
    const std::size_t n = tables[0].values.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 1; k < tables.size(); ++k) {
            double rise = tables[k].values[i] - tables[k - 1].values[i];
            double scale = std::max(std::abs(tables[k].values[i]), 1e-300);
            if (rise < 0.0)
                out.max_monotonicity_violation =
                    std::max(out.max_monotonicity_violation, -rise / scale);
        }
        std::size_t last = tables.size() - 1;
        double d1 = tables[last].values[i] - tables[last - 1].values[i];
        double d0 = tables[last - 1].values[i] - tables[last - 2].values[i];
        double ratio = (std::abs(d0) > 1e-300) ? std::clamp(d1 / d0, 0.0, 0.95) : 0.0;
        double correction = d1 * ratio / (1.0 - ratio);
        // monotone-sequence bracketing: limit in [f_last, f_last + 2 d1]
        correction = std::clamp(correction, 0.0, 2.0 * std::max(d1, 0.0));
        out.table.values[i] = tables[last].values[i] + correction;
        out.extrapolation_residual =
            std::max(out.extrapolation_residual,
                     correction / std::max(std::abs(out.table.values[i]), 1e-300));
    }
    if (out.max_monotonicity_violation > noise_floor)
        throw std::runtime_error("eps_limit: monotonicity violated beyond estimator noise");
    return out;
}

}  // namespace fkl
