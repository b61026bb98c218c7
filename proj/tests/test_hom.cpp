#include "homqst/hom.hpp"

#include <doctest.h>

#include <random>

using namespace homqst;

namespace {

SourceModel ideal_single_photon() { return SourceModel::custom(1.0, 0.0); }

ExperimentParams balanced() {
    ExperimentParams p;
    p.validate();
    return p;
}

}  // namespace

TEST_CASE("perfect HOM bunching and distinguishable limit") {
    auto s = ideal_single_photon();
    auto p = balanced();
    CHECK(coincidence_zero_delay(1.0, s, s, p) == doctest::Approx(0.0));
    CHECK(coincidence_zero_delay(0.0, s, s, p) == doctest::Approx(0.5));
    CHECK(coincidence_infinite_delay(s, s, p) == doctest::Approx(0.5));
}

TEST_CASE("coherent probe far-delay value") {
    auto target = ideal_single_photon();
    auto probe = SourceModel::coherent(1.0);
    CHECK(coincidence_infinite_delay(target, probe, balanced()) == doctest::Approx(0.75));
}

TEST_CASE("infinite delay equals zero delay at M = 0") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        auto target = SourceModel::custom(unif(rng), 2.0 * unif(rng));
        auto probe = SourceModel::custom(unif(rng), 2.0 * unif(rng));
        ExperimentParams p;
        p.transmittance = 0.2 + 0.6 * unif(rng);
        p.reflectance = 1.0 - p.transmittance;
        p.mode_overlap = 0.0;
        p.eta12 = unif(rng);
        CHECK(coincidence_zero_delay(unif(rng), target, probe, p) ==
              doctest::Approx(coincidence_infinite_delay(target, probe, p)).epsilon(1e-12));
    }
}

TEST_CASE("dip depth closed form") {
    auto s = ideal_single_photon();
    auto p = balanced();
    CHECK(dip_depth(1.0, "", s, s, p) == doctest::Approx(0.5));
    CHECK(dip_depth(0.0, "", s, s, p) == doctest::Approx(0.0));

    ExperimentParams imb;
    imb.transmittance = 0.6;
    imb.reflectance = 0.4;
    CHECK(dip_depth(0.5, "", s, s, imb) == doctest::Approx(0.24));
}

TEST_CASE("unknown efficiency label throws") {
    ExperimentParams p;
    p.rel_efficiency = {{"H", 1.0}, {"V", 1.39}};
    auto s = ideal_single_photon();
    CHECK(dip_depth(1.0, "V", s, s, p) == doctest::Approx(0.5 * 1.39));
    CHECK_THROWS_AS(dip_depth(1.0, "D", s, s, p), std::invalid_argument);
}

TEST_CASE("params invariants") {
    ExperimentParams p;
    p.transmittance = 0.6;
    p.reflectance = 0.6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.reflectance = 0.4;
    p.rel_efficiency = {{"H", 1.39}};  // no reference entry equal to 1
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.rel_efficiency["V"] = 1.0;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("hsps visibility matches the measured dip") {
    // target n_s = 1, probe n_p = zeta = 0.694; 1 - P_k / P_inf = 0.707
    auto target = SourceModel::custom(1.0, 0.211);
    auto probe = SourceModel::custom(0.694, 0.355);
    ExperimentParams p;
    p.mode_overlap = 0.901;
    double p_inf = coincidence_infinite_delay(target, probe, p);
    double p_k = coincidence_zero_delay(1.0, target, probe, p);
    CHECK(1.0 - p_k / p_inf == doctest::Approx(0.707).epsilon(1e-3));
    CHECK(visibility(target, probe, 0.901, 1.0) == doctest::Approx(1.0 - p_k / p_inf));
}

TEST_CASE("visibility formula reference values") {
    auto thermal_probe = SourceModel::custom(0.0646, 2.0);
    auto target_a = SourceModel::custom(1.0, 0.211);
    CHECK(visibility(target_a, thermal_probe, 0.901, 1.0) == doctest::Approx(0.334).epsilon(3e-3));

    auto coherent_probe = SourceModel::custom(0.382, 1.0);
    auto target_c = SourceModel::custom(1.0, 0.191);
    CHECK(visibility(target_c, coherent_probe, 0.901, 1.0) == doctest::Approx(0.626).epsilon(2e-3));

    auto ideal = ideal_single_photon();
    CHECK(visibility(ideal, SourceModel::custom(0.3, 0.0), 1.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("overlap inversion") {
    auto sol = solve_overlap_from_visibility(0.707, 0.211, 0.355, 0.694);
    CHECK(sol.mode_overlap == doctest::Approx(0.901).epsilon(2e-3));
    CHECK_FALSE(sol.clamped);

    CHECK(solve_overlap_from_visibility(0.0, 0.211, 0.355, 0.694).mode_overlap ==
          doctest::Approx(0.0));

    // round trip visibility(solve(v)) = v
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 0.6);
    for (int trial = 0; trial < 20; ++trial) {
        double v = unif(rng);
        auto m = solve_overlap_from_visibility(v, 0.211, 0.355, 0.694);
        if (m.clamped) continue;
        auto target = SourceModel::custom(1.0, 0.211);
        auto probe = SourceModel::custom(0.694, 0.355);
        CHECK(visibility(target, probe, m.mode_overlap, 1.0) == doctest::Approx(v).epsilon(1e-12));
    }

    CHECK(solve_overlap_from_visibility(1.0, 0.211, 0.355, 0.694).clamped);
}

TEST_CASE("probe-independence of depth ratios") {
    // central claim: the rho dependence is a pure proportionality for every
    // probe model and interferometer setting
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    auto target = SourceModel::custom(0.5, 0.3);
    for (int trial = 0; trial < 1000; ++trial) {
        auto probe = SourceModel::custom(unif(rng), 3.0 * unif(rng));
        ExperimentParams p;
        p.transmittance = 0.1 + 0.8 * unif(rng);
        p.reflectance = 1.0 - p.transmittance;
        p.mode_overlap = unif(rng);
        p.eta12 = unif(rng);
        double rho1 = unif(rng), rho2 = unif(rng);
        double d1 = dip_depth(rho1, "", target, probe, p);
        double d2 = dip_depth(rho2, "", target, probe, p);
        CHECK(d1 / d2 == doctest::Approx(rho1 / rho2).epsilon(1e-12));
    }
}

TEST_CASE("depth linearity and dark-count invariance") {
    auto target = SourceModel::custom(0.4, 0.2);
    auto probe = SourceModel::custom(0.3, 1.7);
    ExperimentParams p;
    p.mode_overlap = 0.8;
    double base = dip_depth(0.5, "", target, probe, p);

    auto target2 = target;
    target2.mean_photon *= 3.0;
    CHECK(dip_depth(0.5, "", target2, probe, p) == doctest::Approx(3.0 * base));

    auto probe2 = probe;
    probe2.mean_photon *= 2.0;
    CHECK(dip_depth(0.5, "", target, probe2, p) == doctest::Approx(2.0 * base));

    auto p2 = p;
    p2.mode_overlap *= 0.5;
    CHECK(dip_depth(0.5, "", target, probe, p2) == doctest::Approx(0.5 * base));

    CHECK(dip_depth(1.0, "", target, probe, p) == doctest::Approx(2.0 * base));

    // additive background on both P_k and P_inf cancels in the depth
    double b = 0.123;
    double depth_shifted = (coincidence_infinite_delay(target, probe, p) + b) -
                           (coincidence_zero_delay(0.5, target, probe, p) + b);
    CHECK(depth_shifted == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("zero plus depth equals infinite delay exactly") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto target = SourceModel::custom(unif(rng), 2.0 * unif(rng));
        auto probe = SourceModel::custom(unif(rng), 2.0 * unif(rng));
        ExperimentParams p;
        p.transmittance = 0.1 + 0.8 * unif(rng);
        p.reflectance = 1.0 - p.transmittance;
        p.mode_overlap = unif(rng);
        p.eta12 = unif(rng);
        double rho = unif(rng);
        CHECK(coincidence_zero_delay(rho, target, probe, p) + dip_depth(rho, "", target, probe, p) ==
              doctest::Approx(coincidence_infinite_delay(target, probe, p)).epsilon(1e-12));
    }
}

TEST_CASE("visibility maximized at zeta* = sqrt(g2_s / g2_p)") {
    double g2s = 0.211, g2p = 0.355;
    double zeta_star = std::sqrt(g2s / g2p);
    auto vis_at = [&](double zeta) {
        return visibility(SourceModel::custom(1.0, g2s), SourceModel::custom(zeta, g2p), 1.0, 1.0);
    };
    double best = vis_at(zeta_star);
    for (double zeta = 0.05; zeta < 5.0; zeta += 0.01) CHECK(vis_at(zeta) <= best + 1e-12);
}
