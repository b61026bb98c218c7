#pragma once

#include "homqst/experiment.hpp"
#include "homqst/quantum.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace homqst {

enum class DepthFlag { ok, negative, dropped, zeroed };
enum class NegativeStrategy { zero, drop };

NegativeStrategy strategy_from_string(const std::string& s);
std::string to_string(NegativeStrategy s);

/// Efficiency-normalized depth rates, one entry per frame setting.
struct DepthVector {
    std::vector<std::string> labels;
    std::vector<double> values;  // depth rate / rel_efficiency, rate units
    std::vector<DepthFlag> flags;

    std::size_t size() const { return labels.size(); }
    bool usable(std::size_t i) const { return flags[i] != DepthFlag::dropped; }
};

struct MleOptions {
    double convergence_tol = 1e-10;
    int max_iterations = 100000;
    double physicality_tol = 1e-9;
};

struct ReconstructionResult {
    DensityMatrix rho;
    std::optional<HermitianMatrix> rho_linear;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    std::map<std::string, double> fidelities;
    std::map<std::string, double> stderr_fidelities;
    std::string strategy;
};

/// Divides each depth rate by the relative joint detection efficiency of its
/// label. Overall scale stays free; it is fixed downstream via the
/// computational-basis sum.
DepthVector normalize_depths(const Dataset& dataset,
                             const std::map<std::string, double>& rel_efficiency);

/// DepthVector from bare rates (e.g. externally tabulated data).
DepthVector depth_vector_from_rates(const std::vector<std::string>& labels,
                                    const std::vector<double>& rates);

DepthVector handle_negatives(const DepthVector& depths, NegativeStrategy strategy);

/// Unconstrained least-squares solve of <k|X|k> = depth over Hermitian X,
/// normalized by its trace. Exact on noiseless forward-model data.
HermitianMatrix linear_inversion(const DepthVector& depths, const ProbeFrame& frame);

/// Diluted R-rho-R maximum likelihood on non-negative depth data:
/// Poisson-type likelihood sum_k d_k log(s rho_k) - s rho_k with the scale s
/// profiled out each step. Log-likelihood ascent is enforced every iteration.
ReconstructionResult mle_from_depths(const DepthVector& depths, const ProbeFrame& frame,
                                     NegativeStrategy strategy, const MleOptions& options = {});

/// Full Poisson likelihood on raw zero-delay and far-delay counts with
/// per-setting baseline and a shared depth scale as nuisance parameters.
/// Negative sampled depths need no special handling here.
ReconstructionResult mle_reconstruct(const Dataset& dataset, const ProbeFrame& frame,
                                     const std::map<std::string, double>& rel_efficiency,
                                     const MleOptions& options = {});

/// Monte Carlo standard deviations of the fidelities: counts resampled
/// Poisson(observed), reconstruction repeated per resample.
std::map<std::string, double> fidelity_errors(const Dataset& dataset, const ProbeFrame& frame,
                                              const std::map<std::string, double>& rel_efficiency,
                                              int n_resamples, std::uint64_t seed,
                                              const MleOptions& options = {});

/// Projective-measurement baseline: Poisson counts with rate proportional to
/// <k|rho|k>, reconstructed through the same diluted MLE.
ReconstructionResult conventional_qst(const DensityMatrix& rho_true, const ProbeFrame& frame,
                                      double counts_per_setting, std::uint64_t seed,
                                      const MleOptions& options = {});

/// Two-qubit reconstruction: joint probabilities extracted from the joint,
/// marginal and baseline records, then linear inversion plus MLE.
ReconstructionResult reconstruct_2qubit(const Dataset& dataset, const ProbeFrame& frame,
                                        const MleOptions& options = {});

}  // namespace homqst
