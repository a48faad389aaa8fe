#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fkl/propagator.hpp"

using Catch::Approx;

namespace {
fkl::DerivedConstants constants(double alpha, double delta) {
    return fkl::DerivedConstants::compute({3, alpha, delta, 0.0});
}

fkl::PropagatorConfig quick_duhamel() {
    fkl::PropagatorConfig cfg;
    cfg.n_tau = 12;
    cfg.n_radial = 72;
    cfg.lmax = 24;
    return cfg;
}
}  // namespace

TEST_CASE("duhamel with delta=0 is the free kernel, converged at once",
          "[propagator]") {
    auto c = constants(1.0, 0.0);
    fkl::DuhamelSolver solver(c, 1.0, 1.0, 0.7, {0.7, 1.4}, quick_duhamel());
    fkl::FreeKernelProfile prof(3, 1.0);
    for (double th : {0.0, 0.5 * M_PI, M_PI}) {
        double dist = std::sqrt(0.49 + 1.96 - 2.0 * 0.7 * 1.4 * std::cos(th));
        REQUIRE(solver.eval(1.4, th) == Approx(prof.value(1.0, dist)).epsilon(1e-9));
    }
    REQUIRE(solver.iterations_last_window() <= 2);
    REQUIRE(solver.mass() == Approx(1.0).margin(1e-9));
}

TEST_CASE("duhamel iterates grow monotonically (positive series)", "[propagator]") {
    auto c = constants(1.0, 0.5);
    fkl::DuhamelSolver solver(c, 0.05, 0.5, 1.0, {1.0}, quick_duhamel());
    const auto& norms = solver.first_window_iteration_norms();
    REQUIRE(norms.size() >= 3);
    for (std::size_t k = 1; k < norms.size(); ++k)
        REQUIRE(norms[k] >= norms[k - 1] - 1e-12 * std::abs(norms[k]));
}

TEST_CASE("duhamel kernel is symmetric in (x, y)", "[propagator]") {
    auto c = constants(1.0, 0.5);
    auto cfg = quick_duhamel();
    for (double eps : {0.1, 0.01}) {
        fkl::DuhamelSolver fwd(c, eps, 1.0, 0.6, {1.8}, cfg);
        fkl::DuhamelSolver bwd(c, eps, 1.0, 1.8, {0.6}, cfg);
        for (double th : {0.0, 0.5 * M_PI, M_PI}) {
            double a = fwd.eval(1.8, th), b = bwd.eval(0.6, th);
            REQUIRE(a == Approx(b).epsilon(6e-3));
        }
    }
}

TEST_CASE("duhamel dominates the free kernel and grows with delta", "[propagator]") {
    auto cfg = quick_duhamel();
    auto c1 = constants(1.0, 0.25);
    auto c2 = constants(1.0, 0.5);
    fkl::FreeKernelProfile prof(3, 1.0);
    fkl::DuhamelSolver s1(c1, 0.05, 1.0, 0.8, {0.8, 2.0}, cfg);
    fkl::DuhamelSolver s2(c2, 0.05, 1.0, 0.8, {0.8, 2.0}, cfg);
    for (double r : {0.8, 2.0}) {
        for (double th : {0.0, M_PI / 2}) {
            double dist = std::sqrt(0.64 + r * r - 2.0 * 0.8 * r * std::cos(th));
            double p = prof.value(1.0, dist);
            double q1 = s1.eval(r, th), q2 = s2.eval(r, th);
            REQUIRE(q1 > p * (1.0 - 1e-9));
            REQUIRE(q2 > q1 * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("duhamel mass stays within the Feynman-Kac bounds", "[propagator]") {
    auto c = constants(1.0, 0.5);
    fkl::DuhamelSolver solver(c, 0.1, 0.5, 1.0, {1.0}, quick_duhamel());
    double sup_v = solver.sup_v();
    REQUIRE(solver.mass() >= 1.0 - 1e-6);
    REQUIRE(solver.mass() <= std::exp(0.5 * sup_v) + 1e-6);
}

TEST_CASE("duhamel auto-splits long horizons into windows", "[propagator]") {
    auto c = constants(1.0, 1.0);
    fkl::DuhamelSolver solver(c, 0.01, 2.0, 1.0, {1.0}, quick_duhamel());
    REQUIRE(solver.windows() > 1);
    REQUIRE(solver.measured_contraction() < 1.0);
    REQUIRE(solver.eval(1.0, 0.0) > 0.0);
}

TEST_CASE("radial evolver reproduces the free evolution at delta=0",
          "[propagator]") {
    auto c = constants(1.0, 0.0);
    auto u0 = [](double r) { return std::exp(-r * r); };
    fkl::PropagatorConfig cfg = quick_duhamel();
    fkl::RadialEvolver evo(c, 1.0, 0.5, u0, 0.0, cfg);
    fkl::FreeKernelProfile prof(3, 1.0);
    for (double r : {0.3, 1.0, 2.5}) {
        // independent convolution: int u0(rho) rho^2 (2 pi int p(dist) du) drho
        double want = fkl::integrate_adaptive(
            [&](double rho) {
                double inner = fkl::integrate_gl(
                    [&](double u) {
                        double dist =
                            std::sqrt(r * r + rho * rho - 2.0 * r * rho * u);
                        return prof.value(0.5, dist);
                    },
                    -1.0, 1.0, 64);
                return 2.0 * M_PI * rho * rho * u0(rho) * inner;
            },
            0.0, 10.0, 1e-10);
        REQUIRE(evo.value_at(r) == Approx(want).epsilon(4e-3));
    }
}

TEST_CASE("radial evolver: mass function bounds for the constant", "[propagator]") {
    auto c = constants(1.0, 0.5);
    fkl::PropagatorConfig cfg = quick_duhamel();
    fkl::RadialEvolver evo(c, 0.1, 0.5, [](double) { return 1.0; }, 1.0, cfg);
    double sup_v = c.params.delta * c.hardy_sharp * std::pow(0.1, -0.5);
    for (double r : {0.1, 1.0, 5.0}) {
        double m = evo.value_at(r);
        REQUIRE(m >= 1.0 - 1e-6);
        REQUIRE(m <= std::exp(0.5 * sup_v) + 1e-6);
    }
    // mass grows toward the origin where the potential concentrates
    REQUIRE(evo.value_at(0.05) > evo.value_at(5.0));
}

TEST_CASE("trotter with delta=0 matches the free kernel", "[propagator]") {
    auto c = constants(1.0, 0.0);
    fkl::PropagatorConfig cfg;
    cfg.grid_n = 128;
    cfg.box_halfwidth = 6.4;
    cfg.tail_factor = 1.0;
    cfg.dt = 0.01;
    // resolved distances only: the grid propagator does not cover the
    // near-diagonal spike (that regime belongs to duhamel_picard)
    std::vector<double> radii{0.9, 1.2};
    std::vector<double> angles{0.0, M_PI};
    auto res = fkl::evolve_trotter(c, 0.0, 0.5, 0.5, radii, angles, cfg);
    fkl::FreeKernelProfile prof(3, 1.0);
    double src = res.table.source_radii[0];
    for (std::size_t iy = 0; iy < radii.size(); ++iy)
        for (std::size_t ia = 0; ia < angles.size(); ++ia) {
            double dist = std::sqrt(src * src + radii[iy] * radii[iy] -
                                    2.0 * src * radii[iy] * std::cos(angles[ia]));
            double want = prof.value(0.5, dist);
            // discretization tolerance plus the propagator's own wrap-around
            // estimate, which dominates at the far points
            REQUIRE(res.table.at(0, 0, iy, ia) ==
                    Approx(want).margin(1e-3 * want + 4.0 * res.leakage_estimate));
        }
    REQUIRE(res.final_mass == Approx(1.0).margin(1e-6));
}

TEST_CASE("trotter with a nearly constant potential scales the free kernel",
          "[propagator]") {
    // eps large: V_eps ~ delta c_alpha^{-2} eps^{-alpha/2} everywhere.
    auto c = constants(1.0, 0.5);
    double eps = 400.0;
    double vconst = c.coupling / std::sqrt(eps);
    fkl::PropagatorConfig cfg;
    cfg.grid_n = 128;
    cfg.box_halfwidth = 6.4;
    cfg.tail_factor = 1.0;
    cfg.dt = 0.01;
    std::vector<double> radii{0.9, 1.2};
    std::vector<double> angles{0.0};
    auto res = fkl::evolve_trotter(c, eps, 0.5, 0.5, radii, angles, cfg);
    fkl::FreeKernelProfile prof(3, 1.0);
    double src = res.table.source_radii[0];
    for (std::size_t iy = 0; iy < radii.size(); ++iy) {
        double dist = std::abs(radii[iy] - src);
        double want = std::exp(vconst * 0.5) * prof.value(0.5, dist);
        // V varies by ~(r/20)^2 across the box; 1e-3 after that allowance.
        REQUIRE(res.table.at(0, 0, iy, 0) == Approx(want).epsilon(2e-3));
    }
}

TEST_CASE("trotter configuration guards", "[propagator]") {
    auto c = constants(1.0, 0.5);
    fkl::PropagatorConfig cfg;
    cfg.grid_n = 65;  // not a power of two
    REQUIRE_THROWS_AS(fkl::evolve_trotter(c, 0.1, 0.5, 0.25, {1.0}, {0.0}, cfg),
                      std::domain_error);
    cfg.grid_n = 64;
    cfg.box_halfwidth = 0.5;  // violates the box rule
    REQUIRE_THROWS_AS(fkl::evolve_trotter(c, 0.1, 0.5, 0.25, {1.0}, {0.0}, cfg),
                      std::domain_error);
    cfg.box_halfwidth = 4.8;
    cfg.tail_factor = 1.0;
    REQUIRE_THROWS_AS(fkl::evolve_trotter(c, 1e-6, 0.5, 0.25, {1.0}, {0.0}, cfg),
                      std::domain_error);  // eps below cell^2
}

TEST_CASE("eps_limit extrapolates monotone tables", "[propagator]") {
    auto make = [](double eps, double value) {
        fkl::KernelTable t;
        t.method = "duhamel";
        t.params = {3, 1.0, 0.5, eps};
        t.t_values = {1.0};
        t.source_radii = {0.5};
        t.target_radii = {1.0};
        t.angles = {0.0};
        t.values = {value};
        return t;
    };
    // f(eps) = 2 - eps^{0.5}: monotone increasing as eps decreases.
    std::vector<fkl::KernelTable> tables{make(0.1, 2.0 - std::sqrt(0.1)),
                                         make(0.01, 2.0 - std::sqrt(0.01)),
                                         make(0.001, 2.0 - std::sqrt(0.001))};
    auto lim = fkl::eps_limit(tables);
    double last = tables.back().values[0];
    double inc = tables[2].values[0] - tables[1].values[0];
    REQUIRE(lim.table.values[0] >= last);
    REQUIRE(lim.table.values[0] <= last + 2.0 * inc);
    REQUIRE(lim.table.params.eps == 0.0);
    REQUIRE(lim.max_monotonicity_violation == 0.0);

    // Identical tables (delta = 0): the limit equals the input.
    std::vector<fkl::KernelTable> flat{make(0.1, 1.5), make(0.01, 1.5), make(0.001, 1.5)};
    auto lim2 = fkl::eps_limit(flat);
    REQUIRE(lim2.table.values[0] == Approx(1.5));

    // A decreasing sequence violates monotone convergence.
    std::vector<fkl::KernelTable> bad{make(0.1, 2.0), make(0.01, 1.5), make(0.001, 1.4)};
    REQUIRE_THROWS_AS(fkl::eps_limit(bad), std::runtime_error);
    std::vector<fkl::KernelTable> short_list{make(0.1, 1.0), make(0.01, 1.1)};
    REQUIRE_THROWS_AS(fkl::eps_limit(short_list), std::domain_error);
}
