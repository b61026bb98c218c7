#include "homqst/config.hpp"
#include "homqst/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace homqst;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string format = "json,csv";
    bool quiet = false;
};

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot write " + path.string());
    f << content;
}

bool wants(const RunConfig& cfg, const GlobalOpts& g, const std::string& fmt) {
    if (g.format != "json,csv")
        return g.format == fmt;
    for (const auto& f : cfg.formats)
        if (f == fmt) return true;
    return false;
}

RunConfig load_config(const std::string& path, const GlobalOpts& g) {
    RunConfig cfg = RunConfig::load(path);
    if (g.seed) cfg.acquisition.rng_seed = *g.seed;
    if (g.out) cfg.output_dir = *g.out;
    return cfg;
}

Dataset simulate(const RunConfig& cfg) {
    auto frame = cfg.frame();
    Dataset ds = run_experiment(cfg.target_density(), frame, cfg.target_source, cfg.probe_source,
                                cfg.params, cfg.acquisition);
    ds.frame_kind = cfg.frame_kind;
    ds.config_hash = cfg.config_hash;
    return ds;
}

void write_dataset(const Dataset& ds, const RunConfig& cfg, const GlobalOpts& g) {
    fs::path dir(cfg.output_dir);
    if (wants(cfg, g, "json")) write_file(dir / "dataset.json", to_json(ds).dump(2) + "\n");
    if (wants(cfg, g, "csv")) write_file(dir / "dataset.csv", dataset_to_csv(ds));
    if (!g.quiet)
        std::cout << "wrote " << ds.records.size() << " records to " << dir.string()
                  << " (config " << ds.config_hash << ")\n";
}

void print_result(const ReconstructionResult& res, bool quiet) {
    if (quiet) return;
    std::cout << "strategy: " << res.strategy << "  iterations: " << res.iterations
              << "  logL: " << std::setprecision(12) << res.log_likelihood << "\n";
    std::cout << std::setprecision(4);
    for (const auto& [label, f] : res.fidelities) {
        std::cout << "  F_" << label << " = " << f;
        auto it = res.stderr_fidelities.find(label);
        if (it != res.stderr_fidelities.end()) std::cout << " +- " << it->second;
        std::cout << "\n";
    }
}

ReconstructionResult reconstruct(const Dataset& ds, const ProbeFrame& frame,
                                 const MleOptions& options, int resamples,
                                 std::uint64_t seed) {
    ReconstructionResult res =
        ds.parties == 2 ? reconstruct_2qubit(ds, frame, options)
                        : mle_reconstruct(ds, frame, ds.params.rel_efficiency, options);
    if (resamples >= 2 && ds.parties == 1)
        res.stderr_fidelities =
            fidelity_errors(ds, frame, ds.params.rel_efficiency, resamples, seed, options);
    return res;
}

int cmd_simulate(const std::string& config_path, const GlobalOpts& g) {
    RunConfig cfg = load_config(config_path, g);
    write_dataset(simulate(cfg), cfg, g);
    return kExitOk;
}

int cmd_reconstruct(const std::string& dataset_path, const std::string& strategy, bool both,
                    int resamples, const GlobalOpts& g) {
    std::ifstream f(dataset_path);
    if (!f) throw std::ios_base::failure("cannot open dataset: " + dataset_path);
    Dataset ds = dataset_from_json(Json::parse(f));
    ProbeFrame frame = build_probe_frame(ds.local_dim, ds.parties, ds.frame_kind);

    MleOptions options;
    ReconstructionResult res =
        reconstruct(ds, frame, options, resamples, ds.seed ^ 0x5eedULL);
    print_result(res, g.quiet);

    Json out{{"result", to_json(res)}, {"config_hash", ds.config_hash}};

    if (ds.parties == 1) {
        // depth-likelihood reports per negative-depth strategy, for parity
        // with the zero/drop treatment
        auto depths = normalize_depths(ds, ds.params.rel_efficiency);
        std::vector<NegativeStrategy> strategies;
        if (both)
            strategies = {NegativeStrategy::zero, NegativeStrategy::drop};
        else
            strategies = {strategy_from_string(strategy)};
        for (auto s : strategies) {
            auto r = mle_from_depths(depths, frame, s, options);
            print_result(r, g.quiet);
            out["depth_mle_" + to_string(s)] = to_json(r);
        }
    }

    fs::path dir(g.out.value_or("out"));
    write_file(dir / "result.json", out.dump(2) + "\n");
    if (!g.quiet) std::cout << "wrote " << (dir / "result.json").string() << "\n";
    return kExitOk;
}

int cmd_dip_scan(const std::string& config_path, const std::string& label, int points,
                 const GlobalOpts& g) {
    RunConfig cfg = load_config(config_path, g);
    auto rho = cfg.target_density();
    double rho_k = projection_probability(rho, make_qubit_ket(label));
    DipObservables obs =
        dip_observables(rho_k, label, cfg.target_source, cfg.probe_source, cfg.params);

    std::vector<double> delays = cfg.acquisition.delay_grid;
    if (delays.empty()) {
        double half = kFarDelayFactor * cfg.acquisition.coherence_time;
        for (int i = 0; i < points; ++i)
            delays.push_back(-half + 2.0 * half * i / (points - 1));
    }
    std::vector<double> probs;
    std::vector<long long> counts;
    auto rng = rng_stream(cfg.acquisition.rng_seed, 0);
    for (double tau : delays) {
        double p = dip_profile(obs.depth, obs.p_inf, tau, cfg.acquisition.coherence_time);
        probs.push_back(p);
        counts.push_back(sample_counts(p, cfg.acquisition, rng));
    }
    write_file(fs::path(cfg.output_dir) / ("dip_scan_" + label + ".csv"),
               dip_scan_csv(delays, probs, counts));
    if (!g.quiet)
        std::cout << "visibility(" << label << ") = " << obs.visibility << ", depth rate = "
                  << obs.depth * cfg.acquisition.repetition_rate << " Hz\n";
    return kExitOk;
}

int cmd_visibility(double ns, double np, double g2s, double g2p, double mode_overlap, double rho_k,
                   bool invert, std::optional<double> vex, const GlobalOpts& g) {
    auto target = SourceModel::custom(ns, g2s);
    auto probe = SourceModel::custom(np, g2p);
    if (invert) {
        if (!vex) throw CLI::ValidationError("--invert requires --vex");
        auto sol = solve_overlap_from_visibility(*vex, g2s, g2p, np / ns);
        std::cout << "M = " << sol.mode_overlap << (sol.clamped ? " (clamped)" : "") << "\n";
    } else {
        double v = visibility(target, probe, mode_overlap, rho_k);
        if (g.quiet)
            std::cout << v << "\n";
        else
            std::cout << "V_th = " << v << "  (zeta = " << np / ns << ", g2_s = " << g2s
                      << ", g2_p = " << g2p << ", M = " << mode_overlap << ")\n";
    }
    return kExitOk;
}

int cmd_run_all(const std::string& config_path, const GlobalOpts& g) {
    RunConfig cfg = load_config(config_path, g);
    Dataset ds = simulate(cfg);
    write_dataset(ds, cfg, g);

    ProbeFrame frame = cfg.frame();
    ReconstructionResult res =
        reconstruct(ds, frame, cfg.mle, cfg.resamples, cfg.acquisition.rng_seed ^ 0x5eedULL);
    print_result(res, g.quiet);
    write_file(fs::path(cfg.output_dir) / "result.json",
               Json{{"result", to_json(res)}, {"config_hash", cfg.config_hash}}.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HOM-interference quantum state tomography simulator"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "override the acquisition rng seed");
    app.add_option("--out", g.out, "override the output directory");
    app.add_option("--format", g.format, "output formats (json, csv, or json,csv)");
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    std::string config_path, dataset_path, label = "D", strategy = "drop";
    bool both = false, invert = false;
    int resamples = 0, points = 81;
    double ns = 1.0, np = 1.0, g2s = 0.0, g2p = 0.0, mode_overlap = 1.0, rho_k = 1.0;
    std::optional<double> vex;

    auto* sim = app.add_subcommand("simulate", "simulate a dataset from a config");
    sim->add_option("--config", config_path, "run config file")->required();

    auto* rec = app.add_subcommand("reconstruct", "reconstruct a density matrix from a dataset");
    rec->add_option("--dataset", dataset_path, "dataset json file")->required();
    rec->add_option("--strategy", strategy, "negative-depth strategy (zero|drop)");
    rec->add_flag("--both", both, "report both negative-depth strategies");
    rec->add_option("--resamples", resamples, "Monte Carlo resamples for error bars");

    auto* scan = app.add_subcommand("dip-scan", "export a dip profile curve");
    scan->add_option("--config", config_path, "run config file")->required();
    scan->add_option("--label", label, "probe polarization label");
    scan->add_option("--points", points, "delay grid size when the config has none");

    auto* vis = app.add_subcommand("visibility", "evaluate the visibility formula");
    vis->add_option("--ns", ns, "target mean photon number");
    vis->add_option("--np", np, "probe mean photon number");
    vis->add_option("--g2s", g2s, "target g2");
    vis->add_option("--g2p", g2p, "probe g2");
    vis->add_option("--M", mode_overlap, "mode overlap");
    vis->add_option("--rho", rho_k, "projection probability rho_k");
    vis->add_flag("--invert", invert, "solve for M from --vex");
    vis->add_option("--vex", vex, "measured visibility for inversion");

    auto* all = app.add_subcommand("run-all", "simulate, reconstruct and report");
    all->add_option("--config", config_path, "run config file")->required();

    // global flags remain valid after the subcommand name
    for (auto* sub : {sim, rec, scan, vis, all}) sub->fallthrough();

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(config_path, g);
        if (rec->parsed()) return cmd_reconstruct(dataset_path, strategy, both, resamples, g);
        if (scan->parsed()) return cmd_dip_scan(config_path, label, points, g);
        if (vis->parsed())
            return cmd_visibility(ns, np, g2s, g2p, mode_overlap, rho_k, invert, vex, g);
        if (all->parsed()) return cmd_run_all(config_path, g);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        for (const auto& msg : e.messages()) std::cerr << "config error: " << msg << "\n";
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
