#include "homqst/experiment.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace homqst {

void AcquisitionConfig::validate() const {
    if (repetition_rate <= 0.0) throw std::invalid_argument("AcquisitionConfig: repetition_rate <= 0");
    if (integration_time < 0.0) throw std::invalid_argument("AcquisitionConfig: integration_time < 0");
    if (dark_rate < 0.0) throw std::invalid_argument("AcquisitionConfig: dark_rate < 0");
    if (coherence_time <= 0.0) throw std::invalid_argument("AcquisitionConfig: coherence_time <= 0");
}

const MeasurementRecord& Dataset::record(const std::string& label) const {
    for (const auto& r : records)
        if (r.probe_label == label) return r;
    throw std::out_of_range("Dataset: no record for setting " + label);
}

bool Dataset::has_record(const std::string& label) const {
    for (const auto& r : records)
        if (r.probe_label == label) return true;
    return false;
}

double dip_profile(double depth, double p_inf, double delay_ps, double coherence_time_ps) {
    if (coherence_time_ps <= 0.0) throw std::invalid_argument("dip_profile: coherence_time <= 0");
    double x = delay_ps / coherence_time_ps;
    return p_inf - depth * std::exp(-x * x);
}

long long sample_counts(double probability, const AcquisitionConfig& config,
                        std::mt19937_64& rng) {
    double mean = (probability * config.repetition_rate + config.dark_rate) *
                  config.integration_time;
    if (!std::isfinite(mean) || mean < 0.0)
        throw std::invalid_argument("sample_counts: invalid Poisson mean");
    if (mean > 1e15) throw std::overflow_error("sample_counts: Poisson mean overflow");
    if (mean == 0.0) return 0;
    std::poisson_distribution<long long> dist(mean);
    return dist(rng);
}

std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over (seed, index) to decorrelate per-setting streams
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return std::mt19937_64(z);
}

namespace {

double drifted(double p, double delay_ps, const AcquisitionConfig& config) {
    double v = p * (1.0 + config.misalignment_drift * delay_ps);
    return v < 0.0 ? 0.0 : v;
}

MeasurementRecord sample_three_points(const std::string& label, double p_zero, double p_far,
                                      double depth, const AcquisitionConfig& config,
                                      std::mt19937_64& rng) {
    double far_delay = kFarDelayFactor * config.coherence_time;
    // The far points must sit outside the dip; with the Gaussian profile the
    // residual at 5 widths is exp(-25), below any count resolution.
    if (far_delay < 3.0 * config.coherence_time)
        throw std::invalid_argument("three_point_measurement: far delays inside the dip");
    MeasurementRecord rec;
    rec.probe_label = label;
    rec.integration_time = config.integration_time;
    rec.c_zero = sample_counts(drifted(p_zero, 0.0, config), config, rng);
    double far1 = dip_profile(depth, p_far, -far_delay, config.coherence_time);
    double far2 = dip_profile(depth, p_far, far_delay, config.coherence_time);
    rec.c_far.push_back(sample_counts(drifted(far1, -far_delay, config), config, rng));
    rec.c_far.push_back(sample_counts(drifted(far2, far_delay, config), config, rng));
    double far_mean = 0.0;
    for (long long c : rec.c_far) far_mean += static_cast<double>(c);
    far_mean /= static_cast<double>(rec.c_far.size());
    rec.depth_counts = far_mean - static_cast<double>(rec.c_zero);
    return rec;
}

}  // namespace

MeasurementRecord three_point_measurement(const DensityMatrix& rho, const std::string& k_label,
                                          const SourceModel& target, const SourceModel& probe,
                                          const ExperimentParams& params,
                                          const AcquisitionConfig& config, std::mt19937_64& rng) {
    config.validate();
    double rho_k = projection_probability(rho, make_qubit_ket(k_label));
    DipObservables obs = dip_observables(rho_k, k_label, target, probe, params);
    return sample_three_points(k_label, obs.p_k, obs.p_inf, obs.depth, config, rng);
}

double joint_projection(const DensityMatrix& rho, int local_dim,
                        const std::vector<const StateVector*>& party_kets) {
    CMatrix op = CMatrix::Identity(1, 1);
    for (const StateVector* k : party_kets) {
        CMatrix local = k != nullptr
                            ? CMatrix(k->amplitudes() * k->amplitudes().adjoint())
                            : CMatrix(CMatrix::Identity(local_dim, local_dim));
        CMatrix next(op.rows() * local.rows(), op.cols() * local.cols());
        for (Eigen::Index i = 0; i < op.rows(); ++i)
            for (Eigen::Index j = 0; j < op.cols(); ++j)
                next.block(i * local.rows(), j * local.cols(), local.rows(), local.cols()) =
                    op(i, j) * local;
        op = std::move(next);
    }
    if (op.rows() != rho.dim())
        throw std::invalid_argument("joint_projection: dimension mismatch");
    double p = (rho.elements() * op).trace().real();
    if (p < 1e-14) p = 0.0;
    return std::min(p, 1.0);
}

double two_party_probability(const DensityMatrix& rho, const std::vector<std::string>& labels,
                             const std::vector<int>& zero_delay_set, const SourceModel& target,
                             const SourceModel& probe, const ExperimentParams& params) {
    if (labels.size() != 2) throw std::invalid_argument("two_party_probability: need 2 labels");
    MultiSetting setting;
    setting.parties = 2;
    setting.zero_delay_set = zero_delay_set;
    setting.probe_labels = labels;

    ProbeEnsemble targets({target, target}, CrossCorrelationRule::independent_product);
    ProbeEnsemble probes({probe, probe}, CrossCorrelationRule::independent_product);
    std::vector<ExperimentParams> per_party{params, params};

    auto rho_of_subset = [&](const std::vector<int>& subset) {
        std::vector<StateVector> kets;
        std::vector<const StateVector*> ptrs(2, nullptr);
        kets.reserve(subset.size());
        for (int i : subset) kets.push_back(make_qubit_ket(labels[i]));
        std::size_t pos = 0;
        for (int i : subset) ptrs[i] = &kets[pos++];
        return joint_projection(rho, 2, ptrs);
    };
    return multi_coincidence(setting, rho_of_subset, targets, probes, per_party);
}

namespace {

std::vector<std::string> split_label(const std::string& joint) {
    std::vector<std::string> parts;
    std::stringstream ss(joint);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
}

Dataset run_single_party(const DensityMatrix& rho, const ProbeFrame& frame,
                         const SourceModel& target, const SourceModel& probe,
                         const ExperimentParams& params, const AcquisitionConfig& config) {
    Dataset ds;
    ds.records.reserve(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        double rho_k = projection_probability(rho, frame.setting(i));
        DipObservables obs = dip_observables(rho_k, frame.label(i), target, probe, params);
        auto rng = rng_stream(config.rng_seed, i);
        ds.records.push_back(
            sample_three_points(frame.label(i), obs.p_k, obs.p_inf, obs.depth, config, rng));
    }
    return ds;
}

Dataset run_two_party(const DensityMatrix& rho, const ProbeFrame& frame,
                      const SourceModel& target, const SourceModel& probe,
                      const ExperimentParams& params, const AcquisitionConfig& config) {
    // Per-party labels: the frame is a product frame, so the label set of
    // party 0 equals the set of distinct first components.
    std::vector<std::string> party_labels;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        std::string first = split_label(frame.label(i))[0];
        bool seen = false;
        for (const auto& l : party_labels) seen |= (l == first);
        if (!seen) party_labels.push_back(first);
    }

    struct SettingSpec {
        std::string joint_label;
        std::vector<std::string> labels;  // "" for idle
        std::vector<int> zero_set;
    };
    std::vector<SettingSpec> specs;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        auto parts = split_label(frame.label(i));
        specs.push_back({frame.label(i), parts, {0, 1}});
    }
    for (const auto& l : party_labels) specs.push_back({l + ",.", {l, ""}, {0}});
    for (const auto& l : party_labels) specs.push_back({"." + std::string(",") + l, {"", l}, {1}});
    specs.push_back({".,.", {"", ""}, {}});

    Dataset ds;
    ds.records.reserve(specs.size());
    double p_baseline = two_party_probability(rho, {"", ""}, {}, target, probe, params);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& spec = specs[i];
        double p_zero = two_party_probability(rho, spec.labels, spec.zero_set, target, probe, params);
        auto rng = rng_stream(config.rng_seed, i);
        // Far points: every interferometer at large delay, the baseline setting.
        ds.records.push_back(sample_three_points(spec.joint_label, p_zero, p_baseline,
                                                 p_baseline - p_zero, config, rng));
    }
    return ds;
}

}  // namespace

Dataset run_experiment(const DensityMatrix& rho, const ProbeFrame& frame,
                       const SourceModel& target, const SourceModel& probe,
                       const ExperimentParams& params, const AcquisitionConfig& config) {
    config.validate();
    params.validate();
    target.validate();
    probe.validate();
    if (rho.dim() != frame.dim())
        throw std::invalid_argument("run_experiment: state/frame dimension mismatch");

    Dataset ds;
    if (frame.parties() == 1)
        ds = run_single_party(rho, frame, target, probe, params, config);
    else if (frame.parties() == 2 && frame.local_dim() == 2)
        ds = run_two_party(rho, frame, target, probe, params, config);
    else
        throw std::invalid_argument("run_experiment: only n <= 2 qubit parties are supported");

    ds.local_dim = frame.local_dim();
    ds.parties = frame.parties();
    ds.params = params;
    ds.target_source = target;
    ds.probe_source = probe;
    ds.acquisition = config;
    ds.seed = config.rng_seed;
    return ds;
}

}  // namespace homqst
