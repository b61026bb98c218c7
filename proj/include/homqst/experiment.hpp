#pragma once

#include "homqst/hom.hpp"
#include "homqst/quantum.hpp"
#include "homqst/sources.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace homqst {

/// Data-taking parameters. Delays are picoseconds; rates are per second.
struct AcquisitionConfig {
    double repetition_rate = 1e6;   // pulses / s
    double integration_time = 1.0;  // s per data point
    double dark_rate = 0.0;         // accidental coincidences / s, delay independent
    std::vector<double> delay_grid;
    double coherence_time = 1.0;    // dip 1/e half-width, ps
    std::uint64_t rng_seed = 0;
    double misalignment_drift = 0.0;  // relative baseline slope per ps

    void validate() const;
};

/// Far-delay sampling points sit at +-5 coherence times.
constexpr double kFarDelayFactor = 5.0;

/// Counts for one probe setting. For n-partite settings the label joins the
/// per-party labels with ','; '.' marks a party held at large delay.
struct MeasurementRecord {
    std::string probe_label;
    long long c_zero = 0;
    std::vector<long long> c_far;
    double depth_counts = 0.0;  // mean(c_far) - c_zero, may be negative
    double integration_time = 0.0;

    double depth_rate() const { return depth_counts / integration_time; }
    double zero_rate() const { return static_cast<double>(c_zero) / integration_time; }
};

/// One simulated experiment: records plus the parameter snapshot needed to
/// reproduce and reconstruct it.
struct Dataset {
    int local_dim = 2;
    int parties = 1;
    FrameKind frame_kind = FrameKind::qubit6;
    std::vector<MeasurementRecord> records;
    ExperimentParams params;
    SourceModel target_source;
    SourceModel probe_source;
    AcquisitionConfig acquisition;
    std::uint64_t seed = 0;
    std::string config_hash;

    const MeasurementRecord& record(const std::string& label) const;
    bool has_record(const std::string& label) const;
};

/// Expected coincidence probability at delay tau:
/// p_inf - depth * exp(-tau^2 / coherence_time^2).
double dip_profile(double depth, double p_inf, double delay_ps, double coherence_time_ps);

/// Poisson draw with mean (probability * repetition_rate + dark_rate) *
/// integration_time. Deterministic under a fixed generator state.
long long sample_counts(double probability, const AcquisitionConfig& config,
                        std::mt19937_64& rng);

/// Independent generator for setting `index`, derived from the seed so that
/// parallel and serial runs agree.
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t index);

/// Samples C_k at zero delay and at the two far-delay points.
MeasurementRecord three_point_measurement(const DensityMatrix& rho, const std::string& k_label,
                                          const SourceModel& target, const SourceModel& probe,
                                          const ExperimentParams& params,
                                          const AcquisitionConfig& config, std::mt19937_64& rng);

/// Full acquisition over the frame. n = 1 produces one record per setting;
/// n = 2 adds the marginal and baseline settings needed for extraction.
Dataset run_experiment(const DensityMatrix& rho, const ProbeFrame& frame,
                       const SourceModel& target, const SourceModel& probe,
                       const ExperimentParams& params, const AcquisitionConfig& config);

/// <k_S| rho_S |k_S> with idle parties traced out: Tr(rho * prod_i O_i),
/// O_i the projector for interfering parties and identity otherwise.
double joint_projection(const DensityMatrix& rho, int local_dim,
                        const std::vector<const StateVector*>& party_kets);

/// Joint 2n-fold probability for a given zero-delay subset, built from the
/// dataset's sources and params replicated per party.
double two_party_probability(const DensityMatrix& rho, const std::vector<std::string>& labels,
                             const std::vector<int>& zero_delay_set, const SourceModel& target,
                             const SourceModel& probe, const ExperimentParams& params);

}  // namespace homqst
