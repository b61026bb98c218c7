#include "homqst/tomography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace homqst {

namespace {

constexpr double kTiny = 1e-300;

double safe_log(double x) { return std::log(std::max(x, kTiny)); }

std::vector<CMatrix> hermitian_basis(int dim) {
    std::vector<CMatrix> basis;
    basis.reserve(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i) {
        CMatrix e = CMatrix::Zero(dim, dim);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
            CMatrix e = CMatrix::Zero(dim, dim);
            e(i, j) = e(j, i) = 1.0;
            basis.push_back(e);
            CMatrix f = CMatrix::Zero(dim, dim);
            f(i, j) = Complex(0, -1);
            f(j, i) = Complex(0, 1);
            basis.push_back(f);
        }
    }
    return basis;
}

std::vector<CMatrix> frame_projectors(const ProbeFrame& frame) {
    std::vector<CMatrix> out;
    out.reserve(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const auto& a = frame.setting(i).amplitudes();
        out.push_back(a * a.adjoint());
    }
    return out;
}

std::map<std::string, double> frame_fidelities(const DensityMatrix& rho, const ProbeFrame& frame) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < frame.size(); ++i)
        out[frame.label(i)] = fidelity_to_ket(rho, frame.setting(i));
    return out;
}

}  // namespace

NegativeStrategy strategy_from_string(const std::string& s) {
    if (s == "zero") return NegativeStrategy::zero;
    if (s == "drop") return NegativeStrategy::drop;
    throw std::invalid_argument("unknown negative-depth strategy: " + s);
}

std::string to_string(NegativeStrategy s) {
    return s == NegativeStrategy::zero ? "zero" : "drop";
}

DepthVector normalize_depths(const Dataset& dataset,
                             const std::map<std::string, double>& rel_efficiency) {
    DepthVector dv;
    for (const auto& rec : dataset.records) {
        // n-partite marginal/baseline records carry '.'; they are not depth
        // entries of the frame.
        if (rec.probe_label.find('.') != std::string::npos) continue;
        double eta = 1.0;
        if (!rel_efficiency.empty()) {
            std::stringstream ss(rec.probe_label);
            std::string part;
            while (std::getline(ss, part, ',')) {
                auto it = rel_efficiency.find(part);
                if (it == rel_efficiency.end())
                    throw std::invalid_argument("normalize_depths: no efficiency for " + part);
                eta *= it->second;
            }
        }
        dv.labels.push_back(rec.probe_label);
        dv.values.push_back(rec.depth_rate() / eta);
        dv.flags.push_back(dv.values.back() < 0.0 ? DepthFlag::negative : DepthFlag::ok);
    }
    return dv;
}

DepthVector depth_vector_from_rates(const std::vector<std::string>& labels,
                                    const std::vector<double>& rates) {
    if (labels.size() != rates.size())
        throw std::invalid_argument("depth_vector_from_rates: size mismatch");
    DepthVector dv;
    dv.labels = labels;
    dv.values = rates;
    for (double v : rates)
        dv.flags.push_back(v < 0.0 ? DepthFlag::negative : DepthFlag::ok);
    return dv;
}

DepthVector handle_negatives(const DepthVector& depths, NegativeStrategy strategy) {
    DepthVector out = depths;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.values[i] < 0.0) {
            if (strategy == NegativeStrategy::zero) {
                out.values[i] = 0.0;
                out.flags[i] = DepthFlag::zeroed;
            } else {
                out.flags[i] = DepthFlag::dropped;
            }
        }
    }
    return out;
}

HermitianMatrix linear_inversion(const DepthVector& depths, const ProbeFrame& frame) {
    int dim = frame.dim();
    auto basis = hermitian_basis(dim);
    int n_params = static_cast<int>(basis.size());

    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < depths.size(); ++i)
        if (depths.usable(i)) used.push_back(i);
    if (static_cast<int>(used.size()) < n_params)
        throw std::invalid_argument("linear_inversion: fewer usable settings than parameters");

    std::vector<std::size_t> frame_idx;
    for (std::size_t i : used) {
        int j = frame.find(depths.labels[i]);
        if (j < 0) throw std::invalid_argument("linear_inversion: label not in frame: " + depths.labels[i]);
        frame_idx.push_back(static_cast<std::size_t>(j));
    }
    if (frame.subset(frame_idx).gram_rank() < n_params)
        throw std::invalid_argument("linear_inversion: frame is rank deficient after drops");

    Eigen::MatrixXd A(used.size(), n_params);
    Eigen::VectorXd b(used.size());
    for (std::size_t r = 0; r < used.size(); ++r) {
        const auto& k = frame.setting(frame_idx[r]).amplitudes();
        for (int c = 0; c < n_params; ++c)
            A(r, c) = (k.adjoint() * basis[c] * k)(0).real();
        b(r) = depths.values[used[r]];
    }
    Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);

    CMatrix X = CMatrix::Zero(dim, dim);
    for (int c = 0; c < n_params; ++c) X += x[c] * basis[c];
    double tr = X.trace().real();
    if (std::abs(tr) < 1e-14)
        throw std::invalid_argument("linear_inversion: vanishing trace, cannot fix the scale");
    return HermitianMatrix(X / tr);
}

namespace {

struct DepthMleData {
    std::vector<CMatrix> projectors;
    std::vector<double> d;  // non-negative depth values
};

double depth_loglike(const DepthMleData& data, const CMatrix& rho, double* scale_out = nullptr) {
    double sum_d = 0.0, sum_p = 0.0;
    std::vector<double> p(data.d.size());
    for (std::size_t k = 0; k < data.d.size(); ++k) {
        p[k] = (rho * data.projectors[k]).trace().real();
        sum_d += data.d[k];
        sum_p += p[k];
    }
    double s = sum_p > 0.0 ? sum_d / sum_p : 0.0;
    if (scale_out) *scale_out = s;
    double L = 0.0;
    for (std::size_t k = 0; k < data.d.size(); ++k) {
        double mu = s * p[k];
        if (data.d[k] > 0.0) L += data.d[k] * safe_log(mu);
        L -= mu;
    }
    return L;
}

/// Diluted gradient-ascent iteration rho <- N[(I+eG) rho (I+eG)], accepting
/// only likelihood-improving steps.
struct MleCore {
    CMatrix rho;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

template <typename LogLike, typename Gradient>
MleCore run_diluted_mle(int dim, const LogLike& loglike, const Gradient& gradient,
                        const MleOptions& options) {
    MleCore core;
    core.rho = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
    core.log_likelihood = loglike(core.rho);
    double eps = 1.0;
    const CMatrix eye = CMatrix::Identity(dim, dim);
    for (core.iterations = 0; core.iterations < options.max_iterations; ++core.iterations) {
        CMatrix G = gradient(core.rho);
        double gnorm = G.norm();
        if (gnorm > 0.0) G /= gnorm;  // dilution acts on the direction only
        bool accepted = false;
        double new_L = core.log_likelihood;
        CMatrix cand;
        for (int halvings = 0; halvings < 80; ++halvings) {
            CMatrix r = (eye + eps * G) * core.rho * (eye + eps * G);
            double tr = r.trace().real();
            if (tr > 0.0) {
                cand = r / tr;
                new_L = loglike(cand);
                if (std::isfinite(new_L) && new_L >= core.log_likelihood) {
                    accepted = true;
                    break;
                }
            }
            eps *= 0.5;
        }
        if (!accepted) {
            core.converged = true;  // no uphill step found at any dilution
            break;
        }
        double gain = new_L - core.log_likelihood;
        core.rho = 0.5 * (cand + cand.adjoint().eval());
        core.log_likelihood = new_L;
        eps = std::min(1.0, eps * 2.0);
        if (gain < options.convergence_tol) {
            core.converged = true;
            ++core.iterations;
            break;
        }
    }
    return core;
}

ReconstructionResult finalize(const MleCore& core, const ProbeFrame& frame,
                              std::optional<HermitianMatrix> rho_linear,
                              const std::string& strategy, const MleOptions& options) {
    DensityMatrix rho = project_to_physical(HermitianMatrix(core.rho));
    (void)options;
    ReconstructionResult res{rho,
                             std::move(rho_linear),
                             core.log_likelihood,
                             core.iterations,
                             core.converged,
                             frame_fidelities(rho, frame),
                             {},
                             strategy};
    return res;
}

}  // namespace

ReconstructionResult mle_from_depths(const DepthVector& raw, const ProbeFrame& frame,
                                     NegativeStrategy strategy, const MleOptions& options) {
    DepthVector depths = handle_negatives(raw, strategy);

    DepthMleData data;
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (!depths.usable(i)) continue;
        int j = frame.find(depths.labels[i]);
        if (j < 0) throw std::invalid_argument("mle_from_depths: label not in frame: " + depths.labels[i]);
        const auto& a = frame.setting(static_cast<std::size_t>(j)).amplitudes();
        data.projectors.push_back(a * a.adjoint());
        data.d.push_back(std::max(0.0, depths.values[i]));
    }
    if (data.d.empty()) throw std::invalid_argument("mle_from_depths: no usable depth entries");

    std::optional<HermitianMatrix> lin;
    try {
        lin = linear_inversion(depths, frame);
    } catch (const std::invalid_argument&) {
        // rank-deficient after drops; the MLE itself can still run
    }

    auto loglike = [&](const CMatrix& rho) { return depth_loglike(data, rho); };
    auto gradient = [&](const CMatrix& rho) {
        double s = 0.0;
        depth_loglike(data, rho, &s);
        CMatrix G = CMatrix::Zero(frame.dim(), frame.dim());
        for (std::size_t k = 0; k < data.d.size(); ++k) {
            double p = (rho * data.projectors[k]).trace().real();
            double mu = s * p;
            double w = (data.d[k] > 0.0 ? data.d[k] / std::max(mu, kTiny) : 0.0) - 1.0;
            G += w * s * data.projectors[k];
        }
        return G;
    };
    MleCore core = run_diluted_mle(frame.dim(), loglike, gradient, options);
    if (!core.converged)
        throw std::runtime_error("mle_from_depths: no convergence after " +
                                 std::to_string(core.iterations) + " iterations");
    return finalize(core, frame, std::move(lin), to_string(strategy), options);
}

namespace {

struct CountSetting {
    CMatrix projector;
    double w = 1.0;  // relative joint efficiency
    double t = 1.0;  // integration time
    double c_zero = 0.0;
    std::vector<double> c_far;
    double far_total = 0.0;
};

/// Baseline update: argmax over b of the per-setting likelihood with the
/// dip amplitude a held fixed. Closed form from the quadratic stationarity
/// condition F/b + c0/(b-a) = (m+1) t.
double update_baseline(const CountSetting& cs, double a) {
    double q = (static_cast<double>(cs.c_far.size()) + 1.0) * cs.t;
    double sum = q * a + cs.far_total + cs.c_zero;
    double disc = sum * sum - 4.0 * q * cs.far_total * a;
    double b = (sum + std::sqrt(std::max(0.0, disc))) / (2.0 * q);
    double floor = a * (1.0 + 1e-12) + kTiny;
    return std::max(b, floor);
}

double counts_loglike(const std::vector<CountSetting>& settings, const std::vector<double>& b,
                      double s, const std::vector<double>& p) {
    double L = 0.0;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        const auto& cs = settings[k];
        double mu_far = b[k] * cs.t;
        for (double c : cs.c_far) {
            if (c > 0.0) L += c * safe_log(mu_far);
            L -= mu_far;
        }
        double mu0 = (b[k] - s * cs.w * p[k]) * cs.t;
        if (cs.c_zero > 0.0) L += cs.c_zero * safe_log(mu0);
        L -= mu0;
    }
    return L;
}

std::vector<double> projection_values(const std::vector<CountSetting>& settings,
                                      const CMatrix& rho) {
    std::vector<double> p(settings.size());
    for (std::size_t k = 0; k < settings.size(); ++k)
        p[k] = std::max(0.0, (rho * settings[k].projector).trace().real());
    return p;
}

double update_scale(const std::vector<CountSetting>& settings, const std::vector<double>& b,
                    const std::vector<double>& p) {
    double s_max = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < settings.size(); ++k) {
        double a = settings[k].w * p[k];
        if (a > 0.0) s_max = std::min(s_max, b[k] / a);
    }
    if (!std::isfinite(s_max)) return 0.0;
    s_max *= 1.0 - 1e-12;
    auto deriv = [&](double s) {
        double g = 0.0;
        for (std::size_t k = 0; k < settings.size(); ++k) {
            const auto& cs = settings[k];
            double mu0 = (b[k] - s * cs.w * p[k]) * cs.t;
            g += cs.w * p[k] * cs.t * (1.0 - cs.c_zero / std::max(mu0, kTiny));
        }
        return g;
    };
    if (deriv(0.0) <= 0.0) return 0.0;
    if (deriv(s_max) >= 0.0) return s_max;
    double lo = 0.0, hi = s_max;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ReconstructionResult mle_reconstruct(const Dataset& dataset, const ProbeFrame& frame,
                                     const std::map<std::string, double>& rel_efficiency,
                                     const MleOptions& options) {
    if (dataset.parties != 1)
        throw std::invalid_argument("mle_reconstruct: use reconstruct_2qubit for 2-party data");

    std::vector<CountSetting> settings;
    for (const auto& rec : dataset.records) {
        int j = frame.find(rec.probe_label);
        if (j < 0) throw std::invalid_argument("mle_reconstruct: record label not in frame");
        CountSetting cs;
        const auto& a = frame.setting(static_cast<std::size_t>(j)).amplitudes();
        cs.projector = a * a.adjoint();
        if (!rel_efficiency.empty()) {
            auto it = rel_efficiency.find(rec.probe_label);
            if (it == rel_efficiency.end())
                throw std::invalid_argument("mle_reconstruct: no efficiency for " + rec.probe_label);
            cs.w = it->second;
        }
        cs.t = rec.integration_time;
        cs.c_zero = static_cast<double>(rec.c_zero);
        for (long long c : rec.c_far) {
            cs.c_far.push_back(static_cast<double>(c));
            cs.far_total += static_cast<double>(c);
        }
        settings.push_back(std::move(cs));
    }
    if (settings.empty()) throw std::invalid_argument("mle_reconstruct: empty dataset");

    int dim = frame.dim();
    std::vector<double> b(settings.size());
    double s = 0.0;

    std::optional<HermitianMatrix> lin;
    try {
        lin = linear_inversion(handle_negatives(normalize_depths(dataset, rel_efficiency),
                                                NegativeStrategy::zero),
                               frame);
    } catch (const std::invalid_argument&) {
    }

    CMatrix rho = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
    double L = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    double eps = 1.0;
    const CMatrix eye = CMatrix::Identity(dim, dim);

    for (; iterations < options.max_iterations; ++iterations) {
        std::vector<double> p = projection_values(settings, rho);
        for (std::size_t k = 0; k < settings.size(); ++k)
            b[k] = update_baseline(settings[k], s * settings[k].w * p[k]);
        s = update_scale(settings, b, p);
        for (std::size_t k = 0; k < settings.size(); ++k)
            b[k] = update_baseline(settings[k], s * settings[k].w * p[k]);
        double L_coord = counts_loglike(settings, b, s, p);

        CMatrix G = CMatrix::Zero(dim, dim);
        for (std::size_t k = 0; k < settings.size(); ++k) {
            const auto& cs = settings[k];
            double mu0 = (b[k] - s * cs.w * p[k]) * cs.t;
            double w = s * cs.w * cs.t * (1.0 - cs.c_zero / std::max(mu0, kTiny));
            G += w * cs.projector;
        }
        double gnorm = G.norm();
        if (gnorm > 0.0) G /= gnorm;

        bool accepted = false;
        double new_L = L_coord;
        CMatrix cand = rho;
        for (int halvings = 0; halvings < 80; ++halvings) {
            CMatrix r = (eye + eps * G) * rho * (eye + eps * G);
            double tr = r.trace().real();
            if (tr > 0.0) {
                CMatrix c = r / tr;
                std::vector<double> pc = projection_values(settings, c);
                // keep mu0 feasible for the candidate
                bool feasible = true;
                for (std::size_t k = 0; k < settings.size(); ++k)
                    if (b[k] - s * settings[k].w * pc[k] <= 0.0) feasible = false;
                if (feasible) {
                    double Lc = counts_loglike(settings, b, s, pc);
                    if (std::isfinite(Lc) && Lc >= L_coord) {
                        cand = c;
                        new_L = Lc;
                        accepted = true;
                        break;
                    }
                }
            }
            eps *= 0.5;
        }
        double gain = new_L - L;
        rho = 0.5 * (cand + cand.adjoint().eval());
        L = new_L;
        if (accepted) eps = std::min(1.0, eps * 2.0);
        if (iterations > 0 && gain < options.convergence_tol) {
            converged = true;
            ++iterations;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("mle_reconstruct: no convergence after " +
                                 std::to_string(iterations) + " iterations");

    MleCore core{rho, L, iterations, converged};
    return finalize(core, frame, std::move(lin), "likelihood", options);
}

std::map<std::string, double> fidelity_errors(const Dataset& dataset, const ProbeFrame& frame,
                                              const std::map<std::string, double>& rel_efficiency,
                                              int n_resamples, std::uint64_t seed,
                                              const MleOptions& options) {
    if (n_resamples < 2) throw std::invalid_argument("fidelity_errors: need n_resamples >= 2");

    auto resample_once = [&](int r) {
        Dataset copy = dataset;
        auto rng = rng_stream(seed, static_cast<std::uint64_t>(r));
        for (auto& rec : copy.records) {
            std::poisson_distribution<long long> zero_dist(
                std::max<double>(static_cast<double>(rec.c_zero), kTiny));
            rec.c_zero = rec.c_zero > 0 ? zero_dist(rng) : 0;
            double far_mean = 0.0;
            for (auto& c : rec.c_far) {
                std::poisson_distribution<long long> far_dist(
                    std::max<double>(static_cast<double>(c), kTiny));
                c = c > 0 ? far_dist(rng) : 0;
                far_mean += static_cast<double>(c);
            }
            far_mean /= static_cast<double>(rec.c_far.size());
            rec.depth_counts = far_mean - static_cast<double>(rec.c_zero);
        }
        return mle_reconstruct(copy, frame, rel_efficiency, options).fidelities;
    };

    std::vector<std::map<std::string, double>> samples(n_resamples);
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&]() {
            for (int r = next.fetch_add(1); r < n_resamples; r = next.fetch_add(1))
                samples[r] = resample_once(r);
        }));
    }
    for (auto& f : futures) f.get();

    std::map<std::string, double> out;
    for (const auto& [label, unused] : samples[0]) {
        (void)unused;
        double mean = 0.0;
        for (const auto& s : samples) mean += s.at(label);
        mean /= n_resamples;
        double var = 0.0;
        for (const auto& s : samples) {
            double d = s.at(label) - mean;
            var += d * d;
        }
        out[label] = std::sqrt(var / (n_resamples - 1));
    }
    return out;
}

ReconstructionResult conventional_qst(const DensityMatrix& rho_true, const ProbeFrame& frame,
                                      double counts_per_setting, std::uint64_t seed,
                                      const MleOptions& options) {
    if (counts_per_setting <= 0.0)
        throw std::invalid_argument("conventional_qst: counts_per_setting <= 0");
    std::vector<std::string> labels;
    std::vector<double> counts;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        double p = projection_probability(rho_true, frame.setting(i));
        auto rng = rng_stream(seed, i);
        double mean = counts_per_setting * p;
        long long c = 0;
        if (mean > 0.0) {
            std::poisson_distribution<long long> dist(mean);
            c = dist(rng);
        }
        labels.push_back(frame.label(i));
        counts.push_back(static_cast<double>(c));
    }
    return mle_from_depths(depth_vector_from_rates(labels, counts), frame,
                           NegativeStrategy::zero, options);
}

ReconstructionResult reconstruct_2qubit(const Dataset& dataset, const ProbeFrame& frame,
                                        const MleOptions& options) {
    if (dataset.parties != 2)
        throw std::invalid_argument("reconstruct_2qubit: dataset is not 2-party");
    if (!dataset.has_record(".,."))
        throw std::invalid_argument("reconstruct_2qubit: missing baseline record");

    double baseline = dataset.record(".,.").zero_rate();
    std::vector<std::string> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const std::string& joint = frame.label(i);
        auto comma = joint.find(',');
        std::string k1 = joint.substr(0, comma);
        std::string k2 = joint.substr(comma + 1);
        if (!dataset.has_record(k1 + ",.") || !dataset.has_record("." + std::string(",") + k2))
            throw std::invalid_argument("reconstruct_2qubit: missing marginal record for " + joint);
        double p11 = dataset.record(joint).zero_rate();
        double p10 = dataset.record(k1 + ",.").zero_rate();
        double p01 = dataset.record("." + std::string(",") + k2).zero_rate();
        double v = p11 - p10 - p01 + baseline;
        if (!dataset.params.rel_efficiency.empty()) {
            auto e1 = dataset.params.rel_efficiency.find(k1);
            auto e2 = dataset.params.rel_efficiency.find(k2);
            if (e1 == dataset.params.rel_efficiency.end() ||
                e2 == dataset.params.rel_efficiency.end())
                throw std::invalid_argument("reconstruct_2qubit: missing efficiency for " + joint);
            v /= e1->second * e2->second;
        }
        labels.push_back(joint);
        values.push_back(v);
    }
    return mle_from_depths(depth_vector_from_rates(labels, values), frame,
                           NegativeStrategy::zero, options);
}

}  // namespace homqst
