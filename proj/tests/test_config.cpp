#include "homqst/config.hpp"

#include <doctest.h>

using namespace homqst;

namespace {

const char* kSample = R"(
# reference run at published rates
[target]
state = D

[target_source]
kind = hsps
mean_photon = 0.01
g2 = 0.211

[probe_source]
kind = hsps
mean_photon = 0.00694
g2 = 0.355

[params]
transmittance = 0.5
reflectance = 0.5
mode_overlap = 0.901
eta12 = 7.8e-4

[params.rel_efficiency]
H = 1
V = 1.39
D = 1.19
A = 0.77
R = 1.19
L = 1.19

[acquisition]
repetition_rate = 2.5e8
integration_time = 30
dark_rate = 0.1
coherence_time = 2.0
rng_seed = 42

[frame]
kind = qubit6

[tomography]
strategy = drop
resamples = 500

[output]
directory = out
formats = json,csv
)";

}  // namespace

TEST_CASE("config round trip") {
    auto cfg = RunConfig::from_text(ConfigText::parse(kSample));
    CHECK(cfg.target_state == "D");
    CHECK(cfg.target_source.kind == SourceKind::heralded_single_photon);
    CHECK(cfg.target_source.g2 == doctest::Approx(0.211));
    CHECK(cfg.probe_source.mean_photon == doctest::Approx(0.00694));
    CHECK(cfg.params.mode_overlap == doctest::Approx(0.901));
    CHECK(cfg.params.rel_efficiency.at("A") == doctest::Approx(0.77));
    CHECK(cfg.acquisition.rng_seed == 42);
    CHECK(cfg.acquisition.integration_time == doctest::Approx(30.0));
    CHECK(cfg.frame_kind == FrameKind::qubit6);
    CHECK(cfg.strategy == NegativeStrategy::drop);
    CHECK(cfg.resamples == 500);
    CHECK_FALSE(cfg.config_hash.empty());

    auto rho = cfg.target_density();
    CHECK(fidelity_to_ket(rho, make_qubit_ket("D")) == doctest::Approx(1.0));
}

TEST_CASE("config hash is stable and content sensitive") {
    auto a = RunConfig::from_text(ConfigText::parse(kSample));
    auto b = RunConfig::from_text(ConfigText::parse(kSample));
    CHECK(a.config_hash == b.config_hash);
    std::string changed(kSample);
    changed += "\n[acquisition]\nrng_seed = 43\n";
    auto c = RunConfig::from_text(ConfigText::parse(changed));
    CHECK(a.config_hash != c.config_hash);
}

TEST_CASE("invalid beam splitter is a field-level config error") {
    std::string bad(kSample);
    bad += "\n[params]\ntransmittance = 0.7\n";  // T + R != 1
    try {
        RunConfig::from_text(ConfigText::parse(bad));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE_FALSE(e.messages().empty());
        CHECK(e.messages().front().find("[params]") != std::string::npos);
    }
}

TEST_CASE("malformed values are reported with their key") {
    std::string bad(kSample);
    bad += "\n[acquisition]\nintegration_time = alot\n";
    CHECK_THROWS_AS(RunConfig::from_text(ConfigText::parse(bad)), ConfigError);
}

TEST_CASE("bell target state") {
    std::string text(kSample);
    text += "\n[target]\nstate = bell\n[frame]\nkind = qubit4\nn = 2\n";
    auto cfg = RunConfig::from_text(ConfigText::parse(text));
    auto rho = cfg.target_density();
    CHECK(rho.dim() == 4);
    CHECK(rho.elements()(0, 3).real() == doctest::Approx(0.5));
}

TEST_CASE("defaults apply when sections are missing") {
    auto cfg = RunConfig::from_text(ConfigText::parse("[target]\nstate = H\n"));
    CHECK(cfg.frame_kind == FrameKind::qubit6);
    CHECK(cfg.strategy == NegativeStrategy::drop);
    CHECK(cfg.params.transmittance == doctest::Approx(0.5));
}

TEST_CASE("product target labels") {
    auto cfg = RunConfig::from_text(ConfigText::parse("[target]\nstate = D,A\n[frame]\nn = 2\n"));
    auto rho = cfg.target_density();
    CHECK(rho.dim() == 4);
    auto da = StateVector::tensor(make_qubit_ket("D"), make_qubit_ket("A"));
    CHECK(fidelity_to_ket(rho, da) == doctest::Approx(1.0));
}
