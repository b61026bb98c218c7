#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace homqst {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Pure state amplitudes, unit norm. Global phase is fixed so the first
/// nonzero amplitude is real positive.
class StateVector {
public:
    explicit StateVector(CVector amplitudes);

    int dim() const { return static_cast<int>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }

    /// |a><a| as a physical density matrix.
    class DensityMatrix to_density() const;

    static StateVector tensor(const StateVector& a, const StateVector& b);

private:
    CVector amps_;
};

/// Hermitian trace-1 positive-semidefinite operator.
/// Linear-inversion intermediates that may violate positivity live in
/// HermitianMatrix instead.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix elements);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const CMatrix& elements() const { return mat_; }

    static DensityMatrix maximally_mixed(int dim);
    static DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

private:
    CMatrix mat_;
};

/// Hermitian matrix without positivity or trace constraints.
class HermitianMatrix {
public:
    explicit HermitianMatrix(CMatrix elements);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const CMatrix& elements() const { return mat_; }

private:
    CMatrix mat_;
};

enum class FrameKind { qubit6, qubit4, mub_full, custom };

FrameKind frame_kind_from_string(const std::string& s);
std::string to_string(FrameKind kind);

/// Set of labelled product probe states. For reconstruction the projectors
/// must span the d^2n-dimensional real space of Hermitian operators.
class ProbeFrame {
public:
    ProbeFrame(int d, int n, std::vector<std::string> labels,
               std::vector<StateVector> settings);

    int local_dim() const { return d_; }
    int parties() const { return n_; }
    int dim() const;
    std::size_t size() const { return settings_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<StateVector>& settings() const { return settings_; }
    const StateVector& setting(std::size_t i) const { return settings_.at(i); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    int find(const std::string& label) const;  // -1 if absent

    /// Rank of the span of {|k><k|} in Hermitian-operator space.
    int gram_rank() const;
    bool informationally_complete() const { return gram_rank() == dim() * dim(); }

    /// Frame restricted to the settings whose indices are given.
    ProbeFrame subset(const std::vector<std::size_t>& indices) const;

private:
    int d_, n_;
    std::vector<std::string> labels_;
    std::vector<StateVector> settings_;
};

/// Conventional polarization kets on the Bloch sphere; label in {H,V,D,A,R,L}.
StateVector make_qubit_ket(const std::string& label);

/// <k|rho|k>, clamped of numerical dust below 1e-14.
double projection_probability(const DensityMatrix& rho, const StateVector& k);

/// Same quantity under the reporting name F_k.
double fidelity_to_ket(const DensityMatrix& rho, const StateVector& k);

/// Fidelity between a possibly mixed pair, F = (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double state_fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// Product frame of per-party settings. kind=custom requires explicit
/// settings via ProbeFrame's constructor instead.
ProbeFrame build_probe_frame(int d, int n, FrameKind kind);

/// Nearest physical state: clip negative eigenvalues, renormalize trace.
DensityMatrix project_to_physical(const HermitianMatrix& h);

}  // namespace homqst
