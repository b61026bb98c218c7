#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace homqst {

enum class SourceKind { heralded_single_photon, thermal, coherent, custom };

SourceKind source_kind_from_string(const std::string& s);
std::string to_string(SourceKind kind);

/// Light-source statistics: mean photon number per pulse and normally
/// ordered intensity correlation functions.
struct SourceModel {
    SourceKind kind = SourceKind::coherent;
    double mean_photon = 0.0;
    double g2 = 1.0;
    /// Optional explicit table g^(n) for n > 2, indexed from order 3.
    std::optional<std::vector<double>> gn_table;

    static SourceModel heralded(double mean_photon, double g2);
    static SourceModel thermal(double mean_photon);
    static SourceModel coherent(double mean_photon);
    static SourceModel custom(double mean_photon, double g2);

    void validate() const;
};

/// g^(n) of a single source. Order 1 is 1 by normalization; order 2 is the
/// stored g2; higher orders follow the source kind (n! thermal, 1 coherent)
/// or the explicit table.
double g_n(const SourceModel& source, int order);

enum class CrossCorrelationRule { independent_product, partitioned_thermal };

CrossCorrelationRule cross_rule_from_string(const std::string& s);
std::string to_string(CrossCorrelationRule rule);

/// Per-party source list with the rule for joint cross-correlations.
struct ProbeEnsemble {
    std::vector<SourceModel> parties;
    CrossCorrelationRule cross_correlation_rule = CrossCorrelationRule::independent_product;

    ProbeEnsemble() = default;
    ProbeEnsemble(std::vector<SourceModel> parties, CrossCorrelationRule rule);

    int size() const { return static_cast<int>(parties.size()); }
};

/// Joint cross-correlation g over all parties of the ensemble:
/// 1 for independent sources, n! for an n-partitioned thermal beam.
double cross_g_n(const ProbeEnsemble& ensemble);

/// Same, restricted to a subset of `count` parties.
double cross_g_subset(const ProbeEnsemble& ensemble, int count);

}  // namespace homqst
