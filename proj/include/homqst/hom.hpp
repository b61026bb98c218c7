#pragma once

#include "homqst/sources.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace homqst {

/// Beam-splitter and detection parameters of one HOM interferometer.
struct ExperimentParams {
    double transmittance = 0.5;
    double reflectance = 0.5;
    /// label -> eta_kk / eta_ref. Empty map means unit efficiency everywhere.
    std::map<std::string, double> rel_efficiency;
    double mode_overlap = 1.0;  // M
    double eta12 = 1.0;         // absolute joint efficiency scale

    void validate() const;
    /// eta_kk = eta12 * rel_efficiency[label]; unknown labels throw when the
    /// map is non-empty.
    double eta_kk(const std::string& label) const;
};

/// Dip observables for one probe setting.
struct DipObservables {
    double p_k = 0.0;
    double p_inf = 0.0;
    double depth = 0.0;       // p_inf - p_k
    double visibility = 0.0;  // depth / p_inf
};

/// Zero-delay coincidence probability P_k. The baseline term uses eta12;
/// the interference term subtracts 2 eta_kk T R n_s n_p M rho_k with
/// eta_kk = eta12 when no label is given.
double coincidence_zero_delay(double rho_k, const SourceModel& target,
                              const SourceModel& probe, const ExperimentParams& params,
                              const std::string& label = "");

/// Far-delay coincidence probability P_inf; independent of rho_k and M.
double coincidence_infinite_delay(const SourceModel& target, const SourceModel& probe,
                                  const ExperimentParams& params);

/// Dip depth Delta_k = 2 eta_kk T R n_s n_p M rho_k.
double dip_depth(double rho_k, const std::string& label, const SourceModel& target,
                 const SourceModel& probe, const ExperimentParams& params);

DipObservables dip_observables(double rho_k, const std::string& label,
                               const SourceModel& target, const SourceModel& probe,
                               const ExperimentParams& params);

/// Theory visibility M rho_k / (1 + (zeta g2_p + g2_s / zeta) / 2),
/// zeta = n_p / n_s.
double visibility(const SourceModel& target, const SourceModel& probe, double mode_overlap,
                  double rho_k);

struct OverlapSolution {
    double mode_overlap = 0.0;
    bool clamped = false;  // raw inversion fell outside [0, 1]
};

/// Inverts the visibility formula for M at rho_k = 1, given zeta explicitly.
OverlapSolution solve_overlap_from_visibility(double v_ex, double g2_target, double g2_probe,
                                              double zeta);

/// One n-partite measurement configuration: parties in zero_delay_set see
/// zero time delay, the rest sit at large delay. probe_labels has one entry
/// per party, empty for parties outside the set.
struct MultiSetting {
    int parties = 1;
    std::vector<int> zero_delay_set;         // sorted, 0-based
    std::vector<std::string> probe_labels;   // size == parties, "" outside the set

    void validate() const;
};

/// Inclusion-exclusion term Delta^(n)_kappa(S') for the subset S' of
/// interfering interferometers. Interfering parties contribute their dip
/// factor 2 T R eta_kk n_s n_p M; idle parties contribute their marginal
/// far-delay factor; joint cross-correlations enter through the ensembles'
/// rules; rho_joint is the joint projection probability over S' parties.
double multi_dip_term(const std::vector<int>& interfering, double rho_joint,
                      const ProbeEnsemble& targets, const ProbeEnsemble& probes,
                      const std::vector<ExperimentParams>& params,
                      const std::vector<std::string>& labels);

/// 2n-fold coincidence probability as the signed sum over subsets of the
/// zero-delay set. rho_of_subset returns the joint projection probability
/// for a given subset of interfering parties (empty subset -> 1).
double multi_coincidence(const MultiSetting& setting,
                         const std::function<double(const std::vector<int>&)>& rho_of_subset,
                         const ProbeEnsemble& targets, const ProbeEnsemble& probes,
                         const std::vector<ExperimentParams>& params);

struct ExtractedProbability {
    double value = 0.0;
    bool out_of_range = false;  // outside [-epsilon, 1 + epsilon]
};

/// Recovers rho_{k1,k2} from the four measured 2-party probabilities:
/// (P_{k1,k2} - P_{k1,0} - P_{0,k2} + Delta_{0,0}) / scale.
ExtractedProbability extract_joint_probability_2q(double p11, double p10, double p01,
                                                  double delta00, double scale,
                                                  double epsilon = 1e-9);

/// The scale coefficient of rho in the full-set term:
/// 2^n T^n R^n eta_Xn n_{s,n} n_{p,n} M_Xn.
double multi_dip_scale(const ProbeEnsemble& targets, const ProbeEnsemble& probes,
                       const std::vector<ExperimentParams>& params,
                       const std::vector<std::string>& labels);

}  // namespace homqst
