#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "qimem/density.hpp"
#include "qimem/errors.hpp"
#include "qimem/rng.hpp"
#include "qimem/state.hpp"

namespace qimem {

/// Complete set of orthogonal projectors with distinct real outcome labels.
class ProjectiveMeasurement {
  public:
    static constexpr double kProjectorTolerance = 1e-10;

    ProjectiveMeasurement(int n_qubits, std::vector<ComplexMatrix> projectors,
                          std::vector<double> outcomes)
        : n_qubits_(n_qubits), projectors_(std::move(projectors)), outcomes_(std::move(outcomes)) {
        const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
        if (projectors_.empty() || projectors_.size() != outcomes_.size()) {
            throw OperatorError("measurement needs matching projectors and outcomes");
        }
        ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
        for (const auto& p : projectors_) {
            if (p.rows() != dim || p.cols() != dim) {
                throw DimensionError("projector dimension mismatch");
            }
            if ((p - p.adjoint()).cwiseAbs().maxCoeff() > kProjectorTolerance ||
                (p * p - p).cwiseAbs().maxCoeff() > kProjectorTolerance) {
                throw OperatorError("measurement operator is not an orthogonal projector");
            }
            sum += p;
        }
        if ((sum - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() >
            kProjectorTolerance) {
            throw OperatorError("projectors do not resolve the identity");
        }
        for (std::size_t i = 0; i < outcomes_.size(); ++i) {
            for (std::size_t j = i + 1; j < outcomes_.size(); ++j) {
                if (outcomes_[i] == outcomes_[j]) {
                    throw OperatorError("measurement outcomes must be distinct");
                }
            }
        }
    }

    /// Basis measurement |b><b| with outcome label b.
    static ProjectiveMeasurement computational_basis(int n_qubits) {
        const Eigen::Index dim = Eigen::Index{1} << n_qubits;
        std::vector<ComplexMatrix> projectors;
        std::vector<double> outcomes;
        projectors.reserve(static_cast<std::size_t>(dim));
        for (Eigen::Index b = 0; b < dim; ++b) {
            ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
            p(b, b) = 1.0;
            projectors.push_back(std::move(p));
            outcomes.push_back(static_cast<double>(b));
        }
        return ProjectiveMeasurement(n_qubits, std::move(projectors), std::move(outcomes));
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t n_outcomes() const { return projectors_.size(); }
    const ComplexMatrix& projector(std::size_t i) const { return projectors_[i]; }
    double outcome(std::size_t i) const { return outcomes_[i]; }

  private:
    int n_qubits_;
    std::vector<ComplexMatrix> projectors_;
    std::vector<double> outcomes_;
};

struct MeasurementRecord {
    double outcome;
    double probability;
    SparseState post_state;
};

/// Projective measurement with Born-rule outcome selection and collapse.
inline MeasurementRecord measure(const SparseState& state, const ProjectiveMeasurement& m,
                                 Rng& rng) {
    if (state.n_qubits() != m.n_qubits()) {
        throw DimensionError("measurement acts on a different register than the state");
    }
    const std::vector<Amplitude> dense = to_dense(state);
    const Eigen::Map<const Eigen::VectorXcd> psi(dense.data(),
                                                 static_cast<Eigen::Index>(dense.size()));
    std::vector<double> probs(m.n_outcomes());
    for (std::size_t i = 0; i < m.n_outcomes(); ++i) {
        probs[i] = std::max(0.0, (psi.adjoint() * m.projector(i) * psi).value().real());
    }
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t chosen = m.n_outcomes() - 1;
    for (std::size_t i = 0; i < m.n_outcomes(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) {
            chosen = i;
            break;
        }
    }
    if (probs[chosen] <= 0.0) {
        // The draw can only land here through cumulative rounding; fall back
        // to the most likely branch rather than dividing by zero.
        chosen = static_cast<std::size_t>(
            std::distance(probs.begin(), std::max_element(probs.begin(), probs.end())));
        if (probs[chosen] <= 0.0) throw Error("measurement has no realizable outcome");
    }
    Eigen::VectorXcd post = m.projector(chosen) * psi / std::sqrt(probs[chosen]);
    SparseState::AmplitudeMap amps;
    for (Eigen::Index l = 0; l < post.size(); ++l) {
        if (std::abs(post(l)) >= SparseState::kPruneThreshold) {
            amps.emplace(static_cast<Label>(l), post(l));
        }
    }
    return MeasurementRecord{m.outcome(chosen), probs[chosen],
                             SparseState::from_amplitudes(state.n_qubits(), std::move(amps))};
}

/// tr(rho * observable) for a Hermitian observable.
inline double expectation(const DensityOperator& rho, const ComplexMatrix& observable) {
    if (observable.rows() != rho.dim() || observable.cols() != rho.dim()) {
        throw DimensionError("observable dimension mismatch");
    }
    if ((observable - observable.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw OperatorError("observable is not Hermitian");
    }
    const std::complex<double> value = (rho.matrix() * observable).trace();
    if (std::abs(value.imag()) > 1e-10) {
        throw OperatorError("expectation value has a non-negligible imaginary part");
    }
    return value.real();
}

/// Measurement direction in the x-y plane of the Bloch sphere; the
/// associated +/-1 observable is cos(phi) sigma_x + sin(phi) sigma_y.
struct EquatorialSetting {
    double phi = 0.0;
};

/// 2x2 matrix of the equatorial observable for one setting.
inline ComplexMatrix equatorial_observable(EquatorialSetting s) {
    ComplexMatrix o = ComplexMatrix::Zero(2, 2);
    o(0, 1) = std::exp(std::complex<double>(0.0, -s.phi));
    o(1, 0) = std::exp(std::complex<double>(0.0, s.phi));
    return o;
}

/// N-party correlation function: expectation of the tensor product of one
/// equatorial observable per qubit. Each observable only connects a basis
/// label with its bitwise complement, so the value reduces to a phase-weighted
/// sum over the anti-diagonal of rho.
inline double correlator(const DensityOperator& rho, std::span<const EquatorialSetting> settings) {
    const int k = rho.n_qubits();
    if (static_cast<int>(settings.size()) != k) {
        throw DimensionError("one equatorial setting per qubit required");
    }
    if (k > 6) throw SizeError("correlators limited to 6 qubits");
    const Label dim = Label{1} << k;
    std::complex<double> acc{0.0, 0.0};
    for (Label b = 0; b < dim; ++b) {
        const Label flipped = ~b & (dim - 1);
        const std::complex<double> elem = rho.matrix()(b, flipped);
        if (elem == std::complex<double>{0.0, 0.0}) continue;
        double phase = 0.0;
        for (int q = 0; q < k; ++q) {
            const bool set = (b >> (k - 1 - q)) & 1u;
            phase += set ? -settings[static_cast<std::size_t>(q)].phi
                         : settings[static_cast<std::size_t>(q)].phi;
        }
        acc += elem * std::exp(std::complex<double>(0.0, phase));
    }
    const double value = acc.real();
    if (std::abs(value) > 1.0 + 1e-10) {
        throw OperatorError("correlator escaped [-1, 1]");
    }
    return std::clamp(value, -1.0, 1.0);
}

/// Produces identically-prepared copies of a state for shot-mode sampling.
using PreparationOracle = std::function<SparseState()>;

/// Estimates a correlator from `shots` single-shot measurements. Every shot
/// stands for one freshly prepared array measured once: per-qubit equatorial
/// outcomes are drawn from the joint +/-1 distribution of the commuting
/// observables on the subset's reduced state (qubits outside the subset are
/// untouched), and the +/-1 products are averaged.
inline double sample_correlator(const PreparationOracle& prepare, std::span<const int> qubits,
                                std::span<const EquatorialSetting> settings, long shots,
                                Rng& rng) {
    if (shots < 1) throw SizeError("shot count must be positive");
    if (qubits.size() != settings.size()) {
        throw DimensionError("one equatorial setting per measured qubit required");
    }
    const DensityOperator reduced = partial_trace(prepare(), qubits);
    const int k = reduced.n_qubits();
    const Label dim = Label{1} << k;

    // Joint outcome r has probability <v_r| rho |v_r> with
    // |v_r> = prod_q (|0> + (-1)^{r_q} e^{i phi_q} |1>)/sqrt(2).
    std::vector<double> cumulative(dim);
    std::vector<int> parity(dim);
    double total = 0.0;
    Eigen::VectorXcd v(dim);
    for (Label r = 0; r < dim; ++r) {
        for (Label l = 0; l < dim; ++l) {
            std::complex<double> amp{1.0, 0.0};
            for (int q = 0; q < k; ++q) {
                const Label bit = Label{1} << (k - 1 - q);
                if (l & bit) {
                    const double sign = (r & bit) ? -1.0 : 1.0;
                    amp *= sign * std::exp(std::complex<double>(
                                      0.0, settings[static_cast<std::size_t>(q)].phi));
                }
            }
            v(l) = amp / std::sqrt(static_cast<double>(dim));
        }
        const double p = std::max(0.0, (v.adjoint() * reduced.matrix() * v).value().real());
        total += p;
        cumulative[r] = total;
        parity[r] = (std::popcount(static_cast<unsigned>(r)) % 2 == 0) ? 1 : -1;
    }

    long sum = 0;
    for (long shot = 0; shot < shots; ++shot) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const Label r = static_cast<Label>(std::min<std::ptrdiff_t>(
            std::distance(cumulative.begin(), it), static_cast<std::ptrdiff_t>(dim - 1)));
        sum += parity[r];
    }
    return static_cast<double>(sum) / static_cast<double>(shots);
}

} // namespace qimem
