#include "homqst/serialize.hpp"

#include <sstream>

namespace homqst {

namespace {

Json matrix_to_json(const CMatrix& m) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return Json{{"dim", m.rows()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const Json& j) {
    int dim = j.at("dim").get<int>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != dim * dim || static_cast<int>(im.size()) != dim * dim)
        throw std::invalid_argument("matrix json: element count mismatch");
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k)
            m(i, k) = Complex(re[i * dim + k].get<double>(), im[i * dim + k].get<double>());
    return m;
}

}  // namespace

Json to_json(const DensityMatrix& rho) { return matrix_to_json(rho.elements()); }

DensityMatrix density_from_json(const Json& j) { return DensityMatrix(matrix_from_json(j)); }

Json to_json(const StateVector& sv) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < sv.amplitudes().size(); ++i) {
        re.push_back(sv.amplitudes()[i].real());
        im.push_back(sv.amplitudes()[i].imag());
    }
    return Json{{"dim", sv.dim()}, {"re", re}, {"im", im}};
}

StateVector state_from_json(const Json& j) {
    int dim = j.at("dim").get<int>();
    CVector v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = Complex(j.at("re")[i].get<double>(), j.at("im")[i].get<double>());
    return StateVector(std::move(v));
}

Json to_json(const HermitianMatrix& h) { return matrix_to_json(h.elements()); }

Json to_json(const DipObservables& obs) {
    return Json{{"p_k", obs.p_k},
                {"p_inf", obs.p_inf},
                {"depth", obs.depth},
                {"visibility", obs.visibility}};
}

Json to_json(const SourceModel& s) {
    return Json{{"kind", to_string(s.kind)}, {"mean_photon", s.mean_photon}, {"g2", s.g2}};
}

SourceModel source_from_json(const Json& j) {
    SourceModel s;
    s.kind = source_kind_from_string(j.at("kind").get<std::string>());
    s.mean_photon = j.at("mean_photon").get<double>();
    s.g2 = j.at("g2").get<double>();
    s.validate();
    return s;
}

Json to_json(const ExperimentParams& p) {
    return Json{{"transmittance", p.transmittance},
                {"reflectance", p.reflectance},
                {"rel_efficiency", p.rel_efficiency},
                {"mode_overlap", p.mode_overlap},
                {"eta12", p.eta12}};
}

ExperimentParams params_from_json(const Json& j) {
    ExperimentParams p;
    p.transmittance = j.at("transmittance").get<double>();
    p.reflectance = j.at("reflectance").get<double>();
    p.rel_efficiency = j.at("rel_efficiency").get<std::map<std::string, double>>();
    p.mode_overlap = j.at("mode_overlap").get<double>();
    p.eta12 = j.at("eta12").get<double>();
    p.validate();
    return p;
}

Json to_json(const AcquisitionConfig& c) {
    return Json{{"repetition_rate", c.repetition_rate},
                {"integration_time", c.integration_time},
                {"dark_rate", c.dark_rate},
                {"delay_grid", c.delay_grid},
                {"coherence_time", c.coherence_time},
                {"rng_seed", c.rng_seed},
                {"misalignment_drift", c.misalignment_drift}};
}

AcquisitionConfig acquisition_from_json(const Json& j) {
    AcquisitionConfig c;
    c.repetition_rate = j.at("repetition_rate").get<double>();
    c.integration_time = j.at("integration_time").get<double>();
    c.dark_rate = j.at("dark_rate").get<double>();
    c.delay_grid = j.at("delay_grid").get<std::vector<double>>();
    c.coherence_time = j.at("coherence_time").get<double>();
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    c.misalignment_drift = j.at("misalignment_drift").get<double>();
    c.validate();
    return c;
}

Json to_json(const MeasurementRecord& r) {
    return Json{{"probe_label", r.probe_label},
                {"c_zero", r.c_zero},
                {"c_far", r.c_far},
                {"depth_counts", r.depth_counts},
                {"integration_time", r.integration_time}};
}

MeasurementRecord record_from_json(const Json& j) {
    MeasurementRecord r;
    r.probe_label = j.at("probe_label").get<std::string>();
    r.c_zero = j.at("c_zero").get<long long>();
    r.c_far = j.at("c_far").get<std::vector<long long>>();
    r.depth_counts = j.at("depth_counts").get<double>();
    r.integration_time = j.at("integration_time").get<double>();
    return r;
}

Json to_json(const Dataset& ds) {
    Json records = Json::array();
    for (const auto& r : ds.records) records.push_back(to_json(r));
    return Json{{"local_dim", ds.local_dim},
                {"parties", ds.parties},
                {"frame_kind", to_string(ds.frame_kind)},
                {"records", records},
                {"params", to_json(ds.params)},
                {"target_source", to_json(ds.target_source)},
                {"probe_source", to_json(ds.probe_source)},
                {"acquisition", to_json(ds.acquisition)},
                {"seed", ds.seed},
                {"config_hash", ds.config_hash}};
}

Dataset dataset_from_json(const Json& j) {
    Dataset ds;
    ds.local_dim = j.at("local_dim").get<int>();
    ds.parties = j.at("parties").get<int>();
    ds.frame_kind = frame_kind_from_string(j.at("frame_kind").get<std::string>());
    for (const auto& r : j.at("records")) ds.records.push_back(record_from_json(r));
    ds.params = params_from_json(j.at("params"));
    ds.target_source = source_from_json(j.at("target_source"));
    ds.probe_source = source_from_json(j.at("probe_source"));
    ds.acquisition = acquisition_from_json(j.at("acquisition"));
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.config_hash = j.at("config_hash").get<std::string>();
    return ds;
}

Json to_json(const ReconstructionResult& r) {
    Json j{{"rho", to_json(r.rho)},
           {"log_likelihood", r.log_likelihood},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"fidelities", r.fidelities},
           {"stderr_fidelities", r.stderr_fidelities},
           {"strategy", r.strategy}};
    if (r.rho_linear) j["rho_linear"] = to_json(*r.rho_linear);
    return j;
}

std::string dataset_to_csv(const Dataset& ds) {
    std::ostringstream out;
    out << "setting,c_zero,c_far_1,c_far_2,depth,time\n";
    for (const auto& r : ds.records) {
        out << r.probe_label << ',' << r.c_zero;
        for (std::size_t i = 0; i < 2; ++i)
            out << ',' << (i < r.c_far.size() ? r.c_far[i] : 0);
        out << ',' << r.depth_counts << ',' << r.integration_time << '\n';
    }
    return out.str();
}

std::string dip_scan_csv(const std::vector<double>& delays,
                         const std::vector<double>& probabilities,
                         const std::vector<long long>& counts) {
    std::ostringstream out;
    out << "delay_ps,expected_probability,sampled_counts\n";
    for (std::size_t i = 0; i < delays.size(); ++i)
        out << delays[i] << ',' << probabilities[i] << ',' << counts[i] << '\n';
    return out.str();
}

}  // namespace homqst
