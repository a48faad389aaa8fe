#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fkl/verifier.hpp"

using Catch::Approx;

namespace {
fkl::PropagatorConfig quick_cfg() {
    fkl::PropagatorConfig cfg;
    cfg.n_tau = 12;
    cfg.n_radial = 64;
    cfg.lmax = 16;
    return cfg;
}

fkl::VerifierGridSpec small_grid() {
    fkl::VerifierGridSpec grid;
    grid.t_values = {0.5, 1.0};
    grid.radii_rel = {0.1, 0.5, 2.0, 4.0};
    grid.angles = {0.0, 0.5 * M_PI, M_PI};
    return grid;
}
}  // namespace

TEST_CASE("delta=0 two-sided ratio reduces to 1/(phi phi) in [1, 4]", "[verifier]") {
    auto c = fkl::DerivedConstants::compute({3, 1.0, 0.0, 0.0});
    auto grid = small_grid();
    auto cfg = quick_cfg();
    cfg.eps_schedule = {1.0};  // irrelevant at delta = 0
    auto profile = std::make_shared<fkl::FreeKernelProfile>(3, 1.0);
    auto tables = fkl::make_duhamel_tables(c, grid, cfg, profile);
    // beta = d: the weight profile is bounded between 1/2 and 1.
    fkl::RadialWeight w(3, 1.0, c.beta);
    auto rep = fkl::check_two_sided({tables.back()}, w, *profile, 100.0);
    REQUIRE(rep.pass);
    REQUIRE(rep.min_ratio >= 1.0 - 5e-3);
    REQUIRE(rep.max_ratio <= 4.0 + 1e-2);
}

TEST_CASE("delta=0 weighted Nash constant is the free on-diagonal bound",
          "[verifier]") {
    auto c = fkl::DerivedConstants::compute({3, 1.0, 0.0, 0.0});
    auto grid = small_grid();
    auto cfg = quick_cfg();
    cfg.eps_schedule = {1.0};
    auto profile = std::make_shared<fkl::FreeKernelProfile>(3, 1.0);
    auto tables = fkl::make_duhamel_tables(c, grid, cfg, profile);
    fkl::RadialWeight w(3, 1.0, c.beta);
    auto rep = fkl::check_weighted_nash({tables.back()}, w);
    REQUIRE(rep.pass);
    // phi >= 1/2 makes the weighted constant at most 4x the free bound
    // p_t(0) t^{d/alpha} = 1/pi^2.
    REQUIRE(rep.constants.at("c_measured") <=
            4.0 / (M_PI * M_PI) * (1.0 + 1e-6));
    REQUIRE(rep.constants.at("t_drift") < 0.05);
}

TEST_CASE("two-sided table is symmetric under x <-> y", "[verifier]") {
    auto c = fkl::DerivedConstants::compute({3, 1.0, 0.5, 0.0});
    auto grid = small_grid();
    auto cfg = quick_cfg();
    cfg.eps_schedule = {0.05};
    auto profile = std::make_shared<fkl::FreeKernelProfile>(3, 1.0);
    auto tables = fkl::make_duhamel_tables(c, grid, cfg, profile);
    const auto& tab = tables.back();
    for (std::size_t it = 0; it < tab.t_values.size(); ++it)
        for (std::size_t ix = 0; ix < tab.source_radii.size(); ++ix)
            for (std::size_t iy = 0; iy < tab.target_radii.size(); ++iy)
                for (std::size_t ia = 0; ia < tab.angles.size(); ++ia) {
                    double a = tab.at(it, ix, iy, ia);
                    double b = tab.at(it, iy, ix, ia);
                    REQUIRE(a == Approx(b).epsilon(8e-3));
                }
}

TEST_CASE("delta=0 L1 bound measures chat near zero", "[verifier]") {
    auto c = fkl::DerivedConstants::compute({3, 1.0, 0.0, 0.0});
    fkl::RadialWeight w(3, 1.0, 3.0);
    auto rep = fkl::check_l1_bound(c, w, {1.0}, {1.0}, quick_cfg());
    REQUIRE(rep.pass);
    REQUIRE(std::abs(rep.constants.at("chat_worst")) < 0.05);
}

TEST_CASE("delta=0 mass check: mass is one, ratio bounded by 2", "[verifier]") {
    auto c = fkl::DerivedConstants::compute({3, 1.0, 0.0, 0.0});
    fkl::RadialWeight w(3, 1.0, 3.0);
    auto rep = fkl::check_mass_upper(c, w, {0.5, 1.0}, 1.0, quick_cfg());
    REQUIRE(rep.pass);
    // mass = 1 and phi_t >= 1/2 give ehat_mass <= 0.
    REQUIRE(rep.constants.at("ehat_mass") <= 1e-3);
}

TEST_CASE("delta=0 lower bound holds with small mu-hat", "[verifier]") {
    auto c = fkl::DerivedConstants::compute({3, 1.0, 0.0, 0.0});
    fkl::RadialWeight w(3, 1.0, 3.0);
    auto rep = fkl::check_lower_prop(c, w, 1.0, 1.0, quick_cfg(), 1.0);
    REQUIRE(rep.pass);
    REQUIRE(rep.constants.at("mu_hat") < 0.25);
    REQUIRE(rep.constants.at("annulus_r_t") >= 0.1);
    REQUIRE(rep.constants.at("annulus_R_min") <= 10.0);
}

TEST_CASE("Hardy-Rellich quotients respect and approach the sharp constant",
          "[verifier][hardy]") {
    auto c = fkl::DerivedConstants::compute({3, 1.0, 1.0, 0.0});
    auto rep = fkl::check_hardy_rellich(c);
    INFO("min quotient " << rep.constants.at("min_quotient") << " vs sharp "
                         << c.hardy_sharp);
    REQUIRE(rep.pass);
    REQUIRE(rep.constants.at("min_quotient") >= c.hardy_sharp * (1.0 - 1e-3));
    REQUIRE(rep.constants.at("ground_gap") <= 0.05);
    REQUIRE(rep.constants.at("ground_gap") >= -1e-3);
}

TEST_CASE("Hardy quotient is scale invariant", "[verifier][hardy]") {
    auto gauss = [](double r) { return std::exp(-r * r); };
    double q1 = fkl::hardy_rayleigh_quotient(gauss, 14.0, 1.0);
    for (double lam : {0.25, 3.0}) {
        auto scaled = [lam](double r) { return std::exp(-(lam * r) * (lam * r)); };
        double q2 = fkl::hardy_rayleigh_quotient(scaled, 14.0 / lam, 1.0);
        REQUIRE(q2 == Approx(q1).epsilon(1e-6));
    }
}

TEST_CASE("RatioReport serializes", "[verifier]") {
    fkl::RatioReport rep;
    rep.id = "demo";
    rep.min_ratio = 0.5;
    rep.max_ratio = 2.0;
    rep.pass = true;
    rep.constants["c"] = 1.25;
    auto j = rep.to_json();
    REQUIRE(j.at("id") == "demo");
    REQUIRE(j.at("verdict") == "pass");
    REQUIRE(j.at("constants").at("c") == 1.25);
}
