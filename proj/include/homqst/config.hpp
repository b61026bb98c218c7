#pragma once

#include "homqst/experiment.hpp"
#include "homqst/quantum.hpp"
#include "homqst/sources.hpp"
#include "homqst/tomography.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace homqst {

/// Validation failure with field-level messages; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> messages);
    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
};

/// Sectioned key = value text, '#' comments, dotted subsections.
class ConfigText {
public:
    static ConfigText parse(const std::string& text);
    static ConfigText load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    const std::map<std::string, std::string>& section(const std::string& name) const;

    const std::string& raw_text() const { return raw_; }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string raw_;
    static const std::map<std::string, std::string> kEmpty;
};

/// Full run description: target state, sources, interferometer, acquisition,
/// frame and tomography options.
struct RunConfig {
    std::string target_state = "D";  // ket label(s), "bell", or empty when a file is given
    std::string target_file;         // density-matrix JSON path

    SourceModel target_source = SourceModel::heralded(0.01, 0.211);
    SourceModel probe_source = SourceModel::heralded(0.00694, 0.355);
    ExperimentParams params;
    AcquisitionConfig acquisition;

    FrameKind frame_kind = FrameKind::qubit6;
    int local_dim = 2;
    int parties = 1;

    NegativeStrategy strategy = NegativeStrategy::drop;
    int resamples = 500;
    MleOptions mle;

    std::string output_dir = "out";
    std::vector<std::string> formats{"json", "csv"};

    std::string config_hash;

    static RunConfig load(const std::string& path);
    static RunConfig from_text(const ConfigText& text);

    DensityMatrix target_density() const;
    ProbeFrame frame() const { return build_probe_frame(local_dim, parties, frame_kind); }
};

/// FNV-1a 64-bit hash, hex encoded; used for config provenance.
std::string fnv1a_hex(const std::string& text);

}  // namespace homqst
