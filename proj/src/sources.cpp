#include "homqst/sources.hpp"

#include <cmath>

namespace homqst {

SourceKind source_kind_from_string(const std::string& s) {
    if (s == "heralded_single_photon" || s == "hsps") return SourceKind::heralded_single_photon;
    if (s == "thermal") return SourceKind::thermal;
    if (s == "coherent") return SourceKind::coherent;
    if (s == "custom") return SourceKind::custom;
    throw std::invalid_argument("unknown source kind: " + s);
}

std::string to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::heralded_single_photon: return "heralded_single_photon";
        case SourceKind::thermal: return "thermal";
        case SourceKind::coherent: return "coherent";
        case SourceKind::custom: return "custom";
    }
    return "?";
}

SourceModel SourceModel::heralded(double mean_photon, double g2) {
    SourceModel m{SourceKind::heralded_single_photon, mean_photon, g2, std::nullopt};
    m.validate();
    return m;
}

SourceModel SourceModel::thermal(double mean_photon) {
    SourceModel m{SourceKind::thermal, mean_photon, 2.0, std::nullopt};
    m.validate();
    return m;
}

SourceModel SourceModel::coherent(double mean_photon) {
    SourceModel m{SourceKind::coherent, mean_photon, 1.0, std::nullopt};
    m.validate();
    return m;
}

SourceModel SourceModel::custom(double mean_photon, double g2) {
    SourceModel m{SourceKind::custom, mean_photon, g2, std::nullopt};
    m.validate();
    return m;
}

void SourceModel::validate() const {
    if (mean_photon < 0.0) throw std::invalid_argument("SourceModel: mean_photon < 0");
    if (g2 < 0.0) throw std::invalid_argument("SourceModel: g2 < 0");
    if (kind == SourceKind::coherent && g2 != 1.0)
        throw std::invalid_argument("SourceModel: coherent light requires g2 = 1");
    if (kind == SourceKind::thermal && g2 != 2.0)
        throw std::invalid_argument("SourceModel: thermal light requires g2 = 2");
}

double g_n(const SourceModel& source, int order) {
    if (order < 1) throw std::invalid_argument("g_n: order must be >= 1");
    if (order == 1) return 1.0;
    if (order == 2) return source.g2;
    if (source.gn_table) {
        std::size_t idx = static_cast<std::size_t>(order - 3);
        if (idx >= source.gn_table->size())
            throw std::invalid_argument("g_n: order beyond the explicit table");
        return (*source.gn_table)[idx];
    }
    switch (source.kind) {
        case SourceKind::thermal:
            return std::tgamma(static_cast<double>(order) + 1.0);  // n!
        case SourceKind::coherent:
            return 1.0;
        case SourceKind::heralded_single_photon:
        case SourceKind::custom:
            throw std::invalid_argument(
                "g_n: order > 2 for this source kind needs an explicit gn table");
    }
    return 1.0;
}

CrossCorrelationRule cross_rule_from_string(const std::string& s) {
    if (s == "independent_product") return CrossCorrelationRule::independent_product;
    if (s == "partitioned_thermal") return CrossCorrelationRule::partitioned_thermal;
    throw std::invalid_argument("unknown cross-correlation rule: " + s);
}

std::string to_string(CrossCorrelationRule rule) {
    return rule == CrossCorrelationRule::independent_product ? "independent_product"
                                                             : "partitioned_thermal";
}

ProbeEnsemble::ProbeEnsemble(std::vector<SourceModel> p, CrossCorrelationRule rule)
    : parties(std::move(p)), cross_correlation_rule(rule) {
    if (parties.empty()) throw std::invalid_argument("ProbeEnsemble: no parties");
    if (rule == CrossCorrelationRule::partitioned_thermal)
        for (const auto& s : parties)
            if (s.kind != SourceKind::thermal)
                throw std::invalid_argument(
                    "ProbeEnsemble: partitioned_thermal requires every party thermal");
}

double cross_g_n(const ProbeEnsemble& ensemble) {
    return cross_g_subset(ensemble, ensemble.size());
}

double cross_g_subset(const ProbeEnsemble& ensemble, int count) {
    if (count < 0 || count > ensemble.size())
        throw std::invalid_argument("cross_g_subset: bad subset size");
    if (count <= 1) return 1.0;
    if (ensemble.cross_correlation_rule == CrossCorrelationRule::partitioned_thermal)
        return std::tgamma(static_cast<double>(count) + 1.0);
    return 1.0;  // independent parties, g^(1) = 1 each
}

}  // namespace homqst
