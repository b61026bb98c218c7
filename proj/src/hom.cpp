#include "homqst/hom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homqst {

void ExperimentParams::validate() const {
    if (transmittance <= 0.0 || transmittance >= 1.0 || reflectance <= 0.0 || reflectance >= 1.0)
        throw std::invalid_argument("ExperimentParams: T and R must lie in (0,1)");
    if (std::abs(transmittance + reflectance - 1.0) > 1e-12)
        throw std::invalid_argument("ExperimentParams: T + R must equal 1");
    if (mode_overlap < 0.0 || mode_overlap > 1.0)
        throw std::invalid_argument("ExperimentParams: mode overlap outside [0,1]");
    if (eta12 <= 0.0 || eta12 > 1.0)
        throw std::invalid_argument("ExperimentParams: eta12 outside (0,1]");
    if (!rel_efficiency.empty()) {
        bool has_reference = false;
        for (const auto& [label, eta] : rel_efficiency) {
            if (eta <= 0.0)
                throw std::invalid_argument("ExperimentParams: rel_efficiency[" + label + "] <= 0");
            if (eta == 1.0) has_reference = true;
        }
        if (!has_reference)
            throw std::invalid_argument("ExperimentParams: no reference label with efficiency 1");
    }
}

double ExperimentParams::eta_kk(const std::string& label) const {
    if (rel_efficiency.empty() || label.empty()) return eta12;
    auto it = rel_efficiency.find(label);
    if (it == rel_efficiency.end())
        throw std::invalid_argument("ExperimentParams: unknown efficiency label " + label);
    return eta12 * it->second;
}

double coincidence_infinite_delay(const SourceModel& target, const SourceModel& probe,
                                  const ExperimentParams& params) {
    double T = params.transmittance, R = params.reflectance;
    double ns = target.mean_photon, np = probe.mean_photon;
    return params.eta12 *
           (T * R * (ns * ns * target.g2 + np * np * probe.g2) + (T * T + R * R) * ns * np);
}

double dip_depth(double rho_k, const std::string& label, const SourceModel& target,
                 const SourceModel& probe, const ExperimentParams& params) {
    if (rho_k < 0.0 || rho_k > 1.0) throw std::invalid_argument("dip_depth: rho_k outside [0,1]");
    return 2.0 * params.eta_kk(label) * params.transmittance * params.reflectance *
           target.mean_photon * probe.mean_photon * params.mode_overlap * rho_k;
}

double coincidence_zero_delay(double rho_k, const SourceModel& target, const SourceModel& probe,
                              const ExperimentParams& params, const std::string& label) {
    if (rho_k < 0.0 || rho_k > 1.0)
        throw std::invalid_argument("coincidence_zero_delay: rho_k outside [0,1]");
    return coincidence_infinite_delay(target, probe, params) -
           dip_depth(rho_k, label, target, probe, params);
}

DipObservables dip_observables(double rho_k, const std::string& label, const SourceModel& target,
                               const SourceModel& probe, const ExperimentParams& params) {
    DipObservables out;
    out.p_inf = coincidence_infinite_delay(target, probe, params);
    out.depth = dip_depth(rho_k, label, target, probe, params);
    out.p_k = out.p_inf - out.depth;
    out.visibility = out.p_inf > 0.0 ? out.depth / out.p_inf : 0.0;
    return out;
}

double visibility(const SourceModel& target, const SourceModel& probe, double mode_overlap,
                  double rho_k) {
    if (target.mean_photon <= 0.0 || probe.mean_photon <= 0.0)
        throw std::invalid_argument("visibility: zero mean photon number");
    double zeta = probe.mean_photon / target.mean_photon;
    return mode_overlap * rho_k / (1.0 + 0.5 * (zeta * probe.g2 + target.g2 / zeta));
}

OverlapSolution solve_overlap_from_visibility(double v_ex, double g2_target, double g2_probe,
                                              double zeta) {
    if (v_ex < 0.0 || v_ex > 1.0)
        throw std::invalid_argument("solve_overlap_from_visibility: v_ex outside [0,1]");
    if (zeta <= 0.0) throw std::invalid_argument("solve_overlap_from_visibility: zeta <= 0");
    double m = v_ex * (1.0 + 0.5 * (zeta * g2_probe + g2_target / zeta));
    if (!std::isfinite(m))
        throw std::invalid_argument("solve_overlap_from_visibility: non-finite result");
    OverlapSolution sol;
    sol.clamped = m < 0.0 || m > 1.0;
    sol.mode_overlap = std::clamp(m, 0.0, 1.0);
    return sol;
}

void MultiSetting::validate() const {
    if (parties < 1) throw std::invalid_argument("MultiSetting: parties < 1");
    if (static_cast<int>(probe_labels.size()) != parties)
        throw std::invalid_argument("MultiSetting: probe_labels size mismatch");
    std::vector<bool> in_set(parties, false);
    for (int i : zero_delay_set) {
        if (i < 0 || i >= parties) throw std::invalid_argument("MultiSetting: party index out of range");
        in_set[i] = true;
    }
    for (int i = 0; i < parties; ++i) {
        if (in_set[i] && probe_labels[i].empty())
            throw std::invalid_argument("MultiSetting: missing probe label for interfering party");
        if (!in_set[i] && !probe_labels[i].empty())
            throw std::invalid_argument("MultiSetting: label assigned to idle party");
    }
}

double multi_dip_term(const std::vector<int>& interfering, double rho_joint,
                      const ProbeEnsemble& targets, const ProbeEnsemble& probes,
                      const std::vector<ExperimentParams>& params,
                      const std::vector<std::string>& labels) {
    int n = targets.size();
    if (probes.size() != n || static_cast<int>(params.size()) != n ||
        static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("multi_dip_term: party count mismatch");

    std::vector<bool> in_set(n, false);
    for (int j : interfering) {
        if (j < 0 || j >= n) throw std::invalid_argument("multi_dip_term: bad party index");
        in_set[j] = true;
    }

    // Joint moments over the interfering subset: n_{s,|S'|} n_{p,|S'|} =
    // g_cross products times per-party means.
    double v = rho_joint * cross_g_subset(targets, static_cast<int>(interfering.size())) *
               cross_g_subset(probes, static_cast<int>(interfering.size()));
    for (int i = 0; i < n; ++i) {
        const auto& p = params[i];
        if (in_set[i]) {
            v *= 2.0 * p.transmittance * p.reflectance * p.eta_kk(labels[i]) *
                 targets.parties[i].mean_photon * probes.parties[i].mean_photon * p.mode_overlap;
        } else {
            v *= coincidence_infinite_delay(targets.parties[i], probes.parties[i], p);
        }
    }
    return v;
}

double multi_coincidence(const MultiSetting& setting,
                         const std::function<double(const std::vector<int>&)>& rho_of_subset,
                         const ProbeEnsemble& targets, const ProbeEnsemble& probes,
                         const std::vector<ExperimentParams>& params) {
    setting.validate();
    const auto& S = setting.zero_delay_set;
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << S.size()); ++mask) {
        std::vector<int> subset;
        for (std::size_t b = 0; b < S.size(); ++b)
            if (mask & (std::size_t{1} << b)) subset.push_back(S[b]);
        double rho = subset.empty() ? 1.0 : rho_of_subset(subset);
        double term =
            multi_dip_term(subset, rho, targets, probes, params, setting.probe_labels);
        total += (subset.size() % 2 == 0 ? 1.0 : -1.0) * term;
    }
    return total;
}

ExtractedProbability extract_joint_probability_2q(double p11, double p10, double p01,
                                                  double delta00, double scale, double epsilon) {
    if (scale <= 0.0) throw std::invalid_argument("extract_joint_probability_2q: scale <= 0");
    ExtractedProbability out;
    out.value = (p11 - p10 - p01 + delta00) / scale;
    out.out_of_range = out.value < -epsilon || out.value > 1.0 + epsilon;
    return out;
}

double multi_dip_scale(const ProbeEnsemble& targets, const ProbeEnsemble& probes,
                       const std::vector<ExperimentParams>& params,
                       const std::vector<std::string>& labels) {
    std::vector<int> all(targets.size());
    for (int i = 0; i < targets.size(); ++i) all[i] = i;
    return multi_dip_term(all, 1.0, targets, probes, params, labels);
}

}  // namespace homqst
