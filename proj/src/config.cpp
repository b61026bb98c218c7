#include "homqst/config.hpp"

#include "homqst/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace homqst {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error(messages.empty() ? "invalid config"
                                          : "invalid config: " + messages.front()),
      messages_(std::move(messages)) {}

const std::map<std::string, std::string> ConfigText::kEmpty{};

ConfigText ConfigText::parse(const std::string& text) {
    ConfigText out;
    out.raw_ = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError({"line " + std::to_string(lineno) + ": unterminated section header"});
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError({"line " + std::to_string(lineno) + ": expected key = value"});
        std::string key = trim(line.substr(0, eq));
        std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError({"line " + std::to_string(lineno) + ": empty key"});
        out.sections_[section][key] = value;
    }
    return out;
}

ConfigText ConfigText::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

bool ConfigText::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string ConfigText::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    auto kv = it->second.find(key);
    return kv == it->second.end() ? fallback : kv->second;
}

double ConfigText::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError({"[" + section + "] " + key + ": not a number: " + v});
    }
}

std::uint64_t ConfigText::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    try {
        std::size_t pos = 0;
        std::uint64_t d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError({"[" + section + "] " + key + ": not an unsigned integer: " + v});
    }
}

int ConfigText::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    try {
        std::size_t pos = 0;
        int d = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError({"[" + section + "] " + key + ": not an integer: " + v});
    }
}

const std::map<std::string, std::string>& ConfigText::section(const std::string& name) const {
    auto it = sections_.find(name);
    return it == sections_.end() ? kEmpty : it->second;
}

namespace {

SourceModel read_source(const ConfigText& t, const std::string& section,
                        std::vector<std::string>& errors, const SourceModel& fallback) {
    SourceModel s = fallback;
    try {
        std::string kind = t.get_string(section, "kind", to_string(fallback.kind));
        s.kind = source_kind_from_string(kind);
        s.mean_photon = t.get_double(section, "mean_photon", fallback.mean_photon);
        double default_g2 = s.kind == SourceKind::thermal    ? 2.0
                            : s.kind == SourceKind::coherent ? 1.0
                                                             : fallback.g2;
        s.g2 = t.get_double(section, "g2", default_g2);
        s.validate();
    } catch (const std::exception& e) {
        errors.push_back("[" + section + "] " + e.what());
    }
    return s;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    RunConfig cfg = from_text(ConfigText::load(path));
    return cfg;
}

RunConfig RunConfig::from_text(const ConfigText& t) {
    RunConfig cfg;
    std::vector<std::string> errors;

    cfg.target_state = t.get_string("target", "state", cfg.target_state);
    cfg.target_file = t.get_string("target", "file", "");

    cfg.target_source = read_source(t, "target_source", errors, cfg.target_source);
    cfg.probe_source = read_source(t, "probe_source", errors, cfg.probe_source);

    try {
        cfg.params.transmittance = t.get_double("params", "transmittance", 0.5);
        cfg.params.reflectance = t.get_double("params", "reflectance", 0.5);
        cfg.params.mode_overlap = t.get_double("params", "mode_overlap", 1.0);
        cfg.params.eta12 = t.get_double("params", "eta12", 1.0);
        for (const auto& [label, value] : t.section("params.rel_efficiency")) {
            try {
                cfg.params.rel_efficiency[label] = std::stod(value);
            } catch (const std::exception&) {
                errors.push_back("[params.rel_efficiency] " + label + ": not a number");
            }
        }
        cfg.params.validate();
    } catch (const std::exception& e) {
        errors.push_back(std::string("[params] ") + e.what());
    }

    try {
        cfg.acquisition.repetition_rate = t.get_double("acquisition", "repetition_rate", 1e6);
        cfg.acquisition.integration_time = t.get_double("acquisition", "integration_time", 1.0);
        cfg.acquisition.dark_rate = t.get_double("acquisition", "dark_rate", 0.0);
        cfg.acquisition.coherence_time = t.get_double("acquisition", "coherence_time", 1.0);
        cfg.acquisition.rng_seed = t.get_u64("acquisition", "rng_seed", 0);
        cfg.acquisition.misalignment_drift = t.get_double("acquisition", "misalignment_drift", 0.0);
        cfg.acquisition.validate();
    } catch (const std::exception& e) {
        errors.push_back(std::string("[acquisition] ") + e.what());
    }

    try {
        cfg.frame_kind = frame_kind_from_string(t.get_string("frame", "kind", "qubit6"));
        cfg.local_dim = t.get_int("frame", "d", 2);
        cfg.parties = t.get_int("frame", "n", 1);
        cfg.frame();  // construction runs the frame checks
    } catch (const std::exception& e) {
        errors.push_back(std::string("[frame] ") + e.what());
    }

    try {
        cfg.strategy = strategy_from_string(t.get_string("tomography", "strategy", "drop"));
        cfg.resamples = t.get_int("tomography", "resamples", 500);
        cfg.mle.convergence_tol = t.get_double("tomography", "convergence_tol", 1e-10);
        cfg.mle.max_iterations = t.get_int("tomography", "max_iterations", 100000);
        cfg.mle.physicality_tol = t.get_double("tomography", "physicality_tol", 1e-9);
        if (cfg.resamples < 2) errors.push_back("[tomography] resamples must be >= 2");
    } catch (const std::exception& e) {
        errors.push_back(std::string("[tomography] ") + e.what());
    }

    cfg.output_dir = t.get_string("output", "directory", "out");
    std::string fmts = t.get_string("output", "formats", "json,csv");
    cfg.formats.clear();
    std::stringstream ss(fmts);
    std::string fmt;
    while (std::getline(ss, fmt, ',')) {
        fmt = trim(fmt);
        if (fmt != "json" && fmt != "csv")
            errors.push_back("[output] formats: unknown format " + fmt);
        else
            cfg.formats.push_back(fmt);
    }

    if (!errors.empty()) throw ConfigError(std::move(errors));
    cfg.config_hash = fnv1a_hex(t.raw_text());
    return cfg;
}

DensityMatrix RunConfig::target_density() const {
    if (!target_file.empty()) {
        std::ifstream f(target_file);
        if (!f) throw std::ios_base::failure("cannot open target state file: " + target_file);
        Json j = Json::parse(f);
        return density_from_json(j);
    }
    if (target_state == "bell") {
        CVector v = CVector::Zero(4);
        v[0] = v[3] = 1.0 / std::sqrt(2.0);
        return StateVector(std::move(v)).to_density();
    }
    // comma-separated per-party ket labels
    std::stringstream ss(target_state);
    std::string part;
    std::vector<StateVector> kets;
    while (std::getline(ss, part, ',')) kets.push_back(make_qubit_ket(trim(part)));
    if (kets.empty()) throw ConfigError({"[target] state: empty state spec"});
    StateVector sv = kets[0];
    for (std::size_t i = 1; i < kets.size(); ++i) sv = StateVector::tensor(sv, kets[i]);
    return sv.to_density();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace homqst
