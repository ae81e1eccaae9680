#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qimem/errors.hpp"
#include "qimem/state.hpp"

namespace qimem {

using ComplexMatrix = Eigen::MatrixXcd;

/// Hermitian trace-one operator on a small qubit register. Rows and columns
/// are indexed by basis labels in the same qubit-0-is-MSB convention as
/// SparseState, so to_density(s).matrix()(r, c) pairs the same labels as the
/// dense vector of s.
///
/// Construction checks Hermiticity and unit trace. Positive semidefiniteness
/// is checked by is_positive_semidefinite(), which is cubic in the dimension
/// and therefore opt-in.
class DensityOperator {
  public:
    static constexpr double kHermTolerance = 1e-12;
    static constexpr double kTraceTolerance = 1e-12;
    static constexpr double kEigenvalueFloor = -1e-10;

    static DensityOperator from_matrix(int n_qubits, ComplexMatrix m) {
        SparseState::check_qubit_count(n_qubits);
        const Eigen::Index dim = Eigen::Index{1} << n_qubits;
        if (m.rows() != dim || m.cols() != dim) {
            throw DimensionError("matrix dimension does not match qubit count");
        }
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermTolerance) {
            throw OperatorError("density matrix is not Hermitian");
        }
        const std::complex<double> tr = m.trace();
        if (std::abs(tr - 1.0) > kTraceTolerance) {
            throw OperatorError("density matrix trace differs from 1");
        }
        return DensityOperator(n_qubits, std::move(m));
    }

    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return mat_.rows(); }
    const ComplexMatrix& matrix() const { return mat_; }

    bool is_positive_semidefinite() const {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(mat_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff() >= kEigenvalueFloor;
    }

  private:
    DensityOperator(int n_qubits, ComplexMatrix m) : n_qubits_(n_qubits), mat_(std::move(m)) {}

    int n_qubits_;
    ComplexMatrix mat_;
};

/// |s><s| as a dense operator. Limited to 12 qubits.
inline DensityOperator to_density(const SparseState& s) {
    if (s.n_qubits() > SparseState::kMaxDenseQubits) {
        throw SizeError("dense density operator limited to " +
                        std::to_string(SparseState::kMaxDenseQubits) + " qubits");
    }
    const Eigen::Index dim = Eigen::Index{1} << s.n_qubits();
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (const auto& [lr, vr] : s.amplitudes()) {
        for (const auto& [lc, vc] : s.amplitudes()) {
            m(lr, lc) = vr * std::conj(vc);
        }
    }
    return DensityOperator::from_matrix(s.n_qubits(), std::move(m));
}

/// Convex combination of density operators. Weights must be nonnegative and
/// sum to one; uniform weights recover the equally-likely-preparation case.
inline DensityOperator mixture(std::span<const DensityOperator> states,
                               std::span<const double> probs) {
    if (states.empty() || states.size() != probs.size()) {
        throw ProbabilityError("mixture needs matching, nonempty states and weights");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw ProbabilityError("negative mixture weight");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ProbabilityError("mixture weights sum to " + std::to_string(sum));
    }
    const int n = states[0].n_qubits();
    ComplexMatrix acc = ComplexMatrix::Zero(states[0].dim(), states[0].dim());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].n_qubits() != n) {
            throw DimensionError("mixture components act on different registers");
        }
        acc += probs[i] * states[i].matrix();
    }
    return DensityOperator::from_matrix(n, std::move(acc));
}

namespace detail {

inline void check_keep_indices(std::span<const int> keep, int n_qubits) {
    if (keep.empty()) throw IndexError("keep set must be nonempty");
    if (keep.size() > 6) throw IndexError("reduced operators limited to 6 qubits");
    std::uint64_t seen = 0;
    for (int q : keep) {
        if (q < 0 || q >= n_qubits) throw IndexError("qubit index out of range");
        const std::uint64_t bit = std::uint64_t{1} << q;
        if (seen & bit) throw IndexError("duplicate qubit index in keep set");
        seen |= bit;
    }
}

} // namespace detail

/// Reduced operator on the qubits listed in `keep` (output qubit j is input
/// qubit keep[j]), with everything else traced out.
inline DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep) {
    detail::check_keep_indices(keep, rho.n_qubits());
    const int k = static_cast<int>(keep.size());
    const int n = rho.n_qubits();
    std::vector<int> env;
    for (int q = 0; q < n; ++q) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) env.push_back(q);
    }
    const Eigen::Index out_dim = Eigen::Index{1} << k;
    const std::uint64_t env_count = std::uint64_t{1} << env.size();
    auto assemble = [&](Label keep_bits, std::uint64_t env_bits) {
        Label l = 0;
        for (int j = 0; j < k; ++j) {
            if ((keep_bits >> (k - 1 - j)) & 1u) l |= Label{1} << (n - 1 - keep[j]);
        }
        for (std::size_t j = 0; j < env.size(); ++j) {
            if ((env_bits >> (env.size() - 1 - j)) & 1u) {
                l |= Label{1} << (n - 1 - env[static_cast<std::size_t>(j)]);
            }
        }
        return l;
    };
    ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
    for (Label r = 0; r < out_dim; ++r) {
        for (Label c = 0; c < out_dim; ++c) {
            std::complex<double> acc{0.0, 0.0};
            for (std::uint64_t e = 0; e < env_count; ++e) {
                acc += rho.matrix()(assemble(r, e), assemble(c, e));
            }
            out(r, c) = acc;
        }
    }
    return DensityOperator::from_matrix(k, std::move(out));
}

/// Reduced operator of a pure state, computed directly from the sparse
/// amplitudes: entries whose labels agree outside `keep` contribute an outer
/// product on the kept qubits. Linear in (sparse size)^2, so it works on the
/// full 30-qubit grids where no dense object exists.
inline DensityOperator partial_trace(const SparseState& s, std::span<const int> keep) {
    detail::check_keep_indices(keep, s.n_qubits());
    const int k = static_cast<int>(keep.size());
    Label keep_mask = 0;
    for (int q : keep) keep_mask |= s.qubit_mask(q);

    auto extract = [&](Label l) {
        Label bits = 0;
        for (int j = 0; j < k; ++j) {
            if (l & s.qubit_mask(keep[static_cast<std::size_t>(j)])) {
                bits |= Label{1} << (k - 1 - j);
            }
        }
        return bits;
    };

    // Group amplitudes by the configuration of the traced-out qubits.
    std::map<Label, std::vector<std::pair<Label, Amplitude>>> groups;
    for (const auto& [l, v] : s.amplitudes()) {
        groups[l & ~keep_mask].emplace_back(extract(l), v);
    }
    const Eigen::Index out_dim = Eigen::Index{1} << k;
    ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
    for (const auto& [env, entries] : groups) {
        for (const auto& [lr, vr] : entries) {
            for (const auto& [lc, vc] : entries) {
                out(lr, lc) += vr * std::conj(vc);
            }
        }
    }
    return DensityOperator::from_matrix(k, std::move(out));
}

} // namespace qimem
