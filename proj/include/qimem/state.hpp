#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qimem/errors.hpp"

namespace qimem {

using Amplitude = std::complex<double>;

/// Computational-basis label of an n-qubit system, packed into an integer.
/// Qubit 0 is the leftmost bit of the written label and therefore the most
/// significant bit of the n-bit word, so numeric order of labels equals
/// lexicographic order of the bitstrings.
using Label = std::uint32_t;

/// Pure n-qubit state stored as a map from basis labels to nonzero
/// amplitudes. Entangled image memories have very few nonzero amplitudes
/// (2^k for k stored shapes), which is what makes grids of up to 30 qubits
/// tractable; dense conversion is allowed only up to 12 qubits.
///
/// Invariants, enforced at construction and preserved by every operation:
///   - sum of |amplitude|^2 is 1 within 1e-12,
///   - no stored entry has |amplitude| < 1e-15,
///   - every amplitude is finite,
///   - every label fits in n_qubits bits.
///
/// States are immutable after construction; all operations are pure
/// functions and safe to share across threads.
class SparseState {
  public:
    static constexpr int kMaxQubits = 30;
    static constexpr int kMaxDenseQubits = 12;
    static constexpr double kPruneThreshold = 1e-15;
    static constexpr double kNormTolerance = 1e-12;

    using AmplitudeMap = std::map<Label, Amplitude>;

    /// |0...0> on n qubits.
    static SparseState zero(int n_qubits) {
        check_qubit_count(n_qubits);
        AmplitudeMap amps;
        amps.emplace(Label{0}, Amplitude{1.0, 0.0});
        return SparseState(n_qubits, std::move(amps));
    }

    /// Builds a state from explicit amplitudes, pruning negligible entries
    /// and verifying normalization.
    static SparseState from_amplitudes(int n_qubits, AmplitudeMap amps) {
        check_qubit_count(n_qubits);
        const Label limit = label_limit(n_qubits);
        double norm2 = 0.0;
        for (auto it = amps.begin(); it != amps.end();) {
            if (it->first >= limit) {
                throw IndexError("basis label does not fit in " + std::to_string(n_qubits) +
                                 " qubits");
            }
            if (!std::isfinite(it->second.real()) || !std::isfinite(it->second.imag())) {
                throw NormalizationError("non-finite amplitude");
            }
            if (std::abs(it->second) < kPruneThreshold) {
                it = amps.erase(it);
                continue;
            }
            norm2 += std::norm(it->second);
            ++it;
        }
        if (std::abs(norm2 - 1.0) > kNormTolerance) {
            throw NormalizationError("state norm^2 is " + std::to_string(norm2) +
                                     ", expected 1");
        }
        return SparseState(n_qubits, std::move(amps));
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return amps_.size(); }
    const AmplitudeMap& amplitudes() const { return amps_; }

    Amplitude amplitude(Label l) const {
        auto it = amps_.find(l);
        return it == amps_.end() ? Amplitude{0.0, 0.0} : it->second;
    }

    /// Bit of qubit `q` within label `l` under this state's width.
    bool bit(Label l, int q) const { return (l >> (n_qubits_ - 1 - q)) & 1u; }

    /// Mask with bit of qubit `q` set.
    Label qubit_mask(int q) const { return Label{1} << (n_qubits_ - 1 - q); }

    std::string label_string(Label l) const {
        std::string s(static_cast<std::size_t>(n_qubits_), '0');
        for (int q = 0; q < n_qubits_; ++q) {
            if (bit(l, q)) s[static_cast<std::size_t>(q)] = '1';
        }
        return s;
    }

    static Label parse_label(std::string_view bits) {
        if (bits.empty() || bits.size() > kMaxQubits) {
            throw ParseError("basis label must have 1..30 bits");
        }
        Label l = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') throw ParseError("basis label must be binary");
            l = (l << 1) | static_cast<Label>(c - '0');
        }
        return l;
    }

    static void check_qubit_count(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw SizeError("qubit count " + std::to_string(n) + " outside 1.." +
                            std::to_string(kMaxQubits));
        }
    }

    static Label label_limit(int n_qubits) { return Label{1} << n_qubits; }

  private:
    SparseState(int n_qubits, AmplitudeMap amps)
        : n_qubits_(n_qubits), amps_(std::move(amps)) {}

    int n_qubits_;
    AmplitudeMap amps_;
};

/// Tensor product: the label of each product entry is the concatenation of
/// the factor labels (a's qubits first).
inline SparseState tensor(const SparseState& a, const SparseState& b) {
    const int n = a.n_qubits() + b.n_qubits();
    if (n > SparseState::kMaxQubits) {
        throw SizeError("tensor product would have " + std::to_string(n) + " qubits");
    }
    SparseState::AmplitudeMap amps;
    for (const auto& [la, va] : a.amplitudes()) {
        const Label high = la << b.n_qubits();
        for (const auto& [lb, vb] : b.amplitudes()) {
            amps.emplace(high | lb, va * vb);
        }
    }
    return SparseState::from_amplitudes(n, std::move(amps));
}

/// <a|b>. Sums over labels present in both states.
inline Amplitude inner(const SparseState& a, const SparseState& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw DimensionError("inner product between states of " +
                             std::to_string(a.n_qubits()) + " and " +
                             std::to_string(b.n_qubits()) + " qubits");
    }
    Amplitude acc{0.0, 0.0};
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& [l, v] : small.amplitudes()) {
        auto it = large.amplitudes().find(l);
        if (it == large.amplitudes().end()) continue;
        // conj always applies to a's amplitude regardless of iteration order.
        const Amplitude va = (&small == &a) ? v : it->second;
        const Amplitude vb = (&small == &a) ? it->second : v;
        acc += std::conj(va) * vb;
    }
    return acc;
}

/// Dense amplitude vector indexed by label. Only for small systems.
inline std::vector<Amplitude> to_dense(const SparseState& s) {
    if (s.n_qubits() > SparseState::kMaxDenseQubits) {
        throw SizeError("dense conversion limited to " +
                        std::to_string(SparseState::kMaxDenseQubits) + " qubits");
    }
    std::vector<Amplitude> v(std::size_t{1} << s.n_qubits(), Amplitude{0.0, 0.0});
    for (const auto& [l, a] : s.amplitudes()) v[l] = a;
    return v;
}

inline SparseState from_dense(int n_qubits, std::span<const Amplitude> v) {
    if (n_qubits > SparseState::kMaxDenseQubits) {
        throw SizeError("dense conversion limited to " +
                        std::to_string(SparseState::kMaxDenseQubits) + " qubits");
    }
    if (v.size() != (std::size_t{1} << n_qubits)) {
        throw DimensionError("dense vector length does not match qubit count");
    }
    SparseState::AmplitudeMap amps;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= SparseState::kPruneThreshold) {
            amps.emplace(static_cast<Label>(i), v[i]);
        }
    }
    return SparseState::from_amplitudes(n_qubits, std::move(amps));
}

} // namespace qimem
