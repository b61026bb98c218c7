#include "homqst/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace homqst {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kHermTol = 1e-12;
constexpr double kEigTol = 1e-10;

CVector fix_global_phase(CVector v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-14) {
            Complex phase = v[i] / std::abs(v[i]);
            v /= phase;
            break;
        }
    }
    return v;
}

}  // namespace

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw std::invalid_argument("StateVector: empty amplitude vector");
    double norm = amps_.norm();
    if (std::abs(norm * norm - 1.0) > 1e-9)
        throw std::invalid_argument("StateVector: squared norm deviates from 1 by more than tolerance");
    amps_ /= norm;  // remove residual dust below the constructor tolerance
    amps_ = fix_global_phase(std::move(amps_));
}

DensityMatrix StateVector::to_density() const {
    return DensityMatrix(amps_ * amps_.adjoint());
}

StateVector StateVector::tensor(const StateVector& a, const StateVector& b) {
    CVector out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j)
            out[i * b.dim() + j] = a.amplitudes()[i] * b.amplitudes()[j];
    return StateVector(std::move(out));
}

DensityMatrix::DensityMatrix(CMatrix elements) : mat_(std::move(elements)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
        throw std::invalid_argument("DensityMatrix: not square");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > kNormTol || std::abs(mat_.trace().imag()) > kNormTol)
        throw std::invalid_argument("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kEigTol)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
    mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::tensor(const DensityMatrix& a, const DensityMatrix& b) {
    int da = a.dim(), db = b.dim();
    CMatrix out(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.elements()(i, j) * b.elements();
    return DensityMatrix(std::move(out));
}

HermitianMatrix::HermitianMatrix(CMatrix elements) : mat_(std::move(elements)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
        throw std::invalid_argument("HermitianMatrix: not square");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("HermitianMatrix: not Hermitian");
    mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
}

FrameKind frame_kind_from_string(const std::string& s) {
    if (s == "qubit6") return FrameKind::qubit6;
    if (s == "qubit4") return FrameKind::qubit4;
    if (s == "mub-full") return FrameKind::mub_full;
    if (s == "custom") return FrameKind::custom;
    throw std::invalid_argument("unknown frame kind: " + s);
}

std::string to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::qubit6: return "qubit6";
        case FrameKind::qubit4: return "qubit4";
        case FrameKind::mub_full: return "mub-full";
        case FrameKind::custom: return "custom";
    }
    return "?";
}

ProbeFrame::ProbeFrame(int d, int n, std::vector<std::string> labels,
                       std::vector<StateVector> settings)
    : d_(d), n_(n), labels_(std::move(labels)), settings_(std::move(settings)) {
    if (d_ < 2 || n_ < 1) throw std::invalid_argument("ProbeFrame: need d >= 2, n >= 1");
    if (labels_.size() != settings_.size() || settings_.empty())
        throw std::invalid_argument("ProbeFrame: labels/settings mismatch");
    int want = dim();
    for (const auto& s : settings_)
        if (s.dim() != want) throw std::invalid_argument("ProbeFrame: setting dimension mismatch");
}

int ProbeFrame::dim() const {
    int d = 1;
    for (int i = 0; i < n_; ++i) d *= d_;
    return d;
}

int ProbeFrame::find(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return static_cast<int>(i);
    return -1;
}

int ProbeFrame::gram_rank() const {
    // Rows are vectorized projectors; rank over the reals equals rank of the
    // complex row matrix since the projectors are Hermitian.
    int D = dim();
    CMatrix rows(settings_.size(), D * D);
    for (std::size_t i = 0; i < settings_.size(); ++i) {
        CMatrix p = settings_[i].amplitudes() * settings_[i].amplitudes().adjoint();
        rows.row(i) = Eigen::Map<CVector>(p.data(), D * D).transpose();
    }
    Eigen::JacobiSVD<CMatrix> svd(rows);
    double tol = 1e-10 * svd.singularValues()[0];
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++rank;
    return rank;
}

ProbeFrame ProbeFrame::subset(const std::vector<std::size_t>& indices) const {
    std::vector<std::string> labels;
    std::vector<StateVector> settings;
    for (std::size_t i : indices) {
        labels.push_back(labels_.at(i));
        settings.push_back(settings_.at(i));
    }
    return ProbeFrame(d_, n_, std::move(labels), std::move(settings));
}

StateVector make_qubit_ket(const std::string& label) {
    const double s = 1.0 / std::sqrt(2.0);
    CVector v(2);
    if (label == "H") v << 1, 0;
    else if (label == "V") v << 0, 1;
    else if (label == "D") v << s, s;
    else if (label == "A") v << s, -s;
    else if (label == "R") v << s, Complex(0, s);
    else if (label == "L") v << s, Complex(0, -s);
    else throw std::invalid_argument("make_qubit_ket: unknown label " + label);
    return StateVector(std::move(v));
}

double projection_probability(const DensityMatrix& rho, const StateVector& k) {
    if (rho.dim() != k.dim())
        throw std::invalid_argument("projection_probability: dimension mismatch");
    double p = (k.amplitudes().adjoint() * rho.elements() * k.amplitudes())(0).real();
    if (p < 1e-14) p = 0.0;
    return std::min(p, 1.0);
}

double fidelity_to_ket(const DensityMatrix& rho, const StateVector& k) {
    return projection_probability(rho, k);
}

double state_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a.elements());
    CVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>();
    CMatrix sqrt_a = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    CMatrix inner = sqrt_a * b.elements() * sqrt_a;
    Eigen::SelfAdjointEigenSolver<CMatrix> es2(inner);
    double tr = 0.0;
    for (Eigen::Index i = 0; i < es2.eigenvalues().size(); ++i)
        tr += std::sqrt(std::max(0.0, es2.eigenvalues()[i]));
    return std::min(1.0, tr * tr);
}

namespace {

// Weyl-Heisenberg MUBs for prime d: the computational basis plus d bases
// with components omega^(b m^2 + j m)/sqrt(d), omega = exp(2 pi i/d).
// For d=2 the standard X/Y eigenbases are used instead.
std::vector<std::pair<std::string, StateVector>> mub_states(int d) {
    std::vector<std::pair<std::string, StateVector>> out;
    if (d == 2) {
        for (const char* l : {"H", "V", "D", "A", "R", "L"})
            out.emplace_back(l, make_qubit_ket(l));
        return out;
    }
    for (int m = 0; m < d; ++m) {
        CVector v = CVector::Zero(d);
        v[m] = 1.0;
        out.emplace_back("Z" + std::to_string(m), StateVector(std::move(v)));
    }
    const double pi = std::acos(-1.0);
    for (int b = 0; b < d; ++b) {
        for (int j = 0; j < d; ++j) {
            CVector v(d);
            for (int m = 0; m < d; ++m) {
                double phase = 2.0 * pi * ((b * m * m + j * m) % d) / d;
                v[m] = std::polar(1.0 / std::sqrt(static_cast<double>(d)), phase);
            }
            out.emplace_back("B" + std::to_string(b) + "S" + std::to_string(j),
                             StateVector(std::move(v)));
        }
    }
    return out;
}

bool is_prime(int d) {
    if (d < 2) return false;
    for (int i = 2; i * i <= d; ++i)
        if (d % i == 0) return false;
    return true;
}

}  // namespace

ProbeFrame build_probe_frame(int d, int n, FrameKind kind) {
    if (d < 2 || n < 1) throw std::invalid_argument("build_probe_frame: need d >= 2, n >= 1");
    std::vector<std::pair<std::string, StateVector>> party;
    switch (kind) {
        case FrameKind::qubit6:
            if (d != 2) throw std::invalid_argument("qubit6 frame requires d = 2");
            for (const char* l : {"H", "V", "D", "A", "R", "L"})
                party.emplace_back(l, make_qubit_ket(l));
            break;
        case FrameKind::qubit4:
            if (d != 2) throw std::invalid_argument("qubit4 frame requires d = 2");
            for (const char* l : {"H", "V", "D", "R"})
                party.emplace_back(l, make_qubit_ket(l));
            break;
        case FrameKind::mub_full:
            if (!is_prime(d)) throw std::invalid_argument("mub-full frame requires prime d");
            party = mub_states(d);
            break;
        case FrameKind::custom:
            throw std::invalid_argument("custom frames are built from explicit settings");
    }

    std::vector<std::string> labels;
    std::vector<StateVector> settings;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        std::string label = party[idx[0]].first;
        StateVector sv = party[idx[0]].second;
        for (int i = 1; i < n; ++i) {
            label += "," + party[idx[i]].first;
            sv = StateVector::tensor(sv, party[idx[i]].second);
        }
        labels.push_back(label);
        settings.push_back(sv);
        int pos = n - 1;
        while (pos >= 0 && ++idx[pos] == party.size()) idx[pos--] = 0;
        if (pos < 0) break;
    }
    return ProbeFrame(d, n, std::move(labels), std::move(settings));
}

DensityMatrix project_to_physical(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.elements());
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    double tr = ev.sum();
    if (tr <= 0.0) return DensityMatrix::maximally_mixed(h.dim());
    ev /= tr;
    CMatrix out = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    return DensityMatrix(std::move(out));
}

}  // namespace homqst
