#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "qimem/density.hpp"
#include "qimem/errors.hpp"
#include "qimem/measurement.hpp"
#include "qimem/rng.hpp"
#include "qimem/state.hpp"

namespace qimem {

/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
inline SparseState make_ghz(int n) {
    if (n < 2 || n > SparseState::kMaxQubits) {
        throw SizeError("GHZ states supported for 2..30 parties");
    }
    SparseState::AmplitudeMap amps;
    const double r = 1.0 / std::numbers::sqrt2;
    amps.emplace(Label{0}, Amplitude{r, 0.0});
    amps.emplace(SparseState::label_limit(n) - 1, Amplitude{r, 0.0});
    return SparseState::from_amplitudes(n, std::move(amps));
}

/// (|01> - |10>)/sqrt(2).
inline SparseState make_singlet() {
    SparseState::AmplitudeMap amps;
    const double r = 1.0 / std::numbers::sqrt2;
    amps.emplace(Label{0b01}, Amplitude{r, 0.0});
    amps.emplace(Label{0b10}, Amplitude{-r, 0.0});
    return SparseState::from_amplitudes(2, std::move(amps));
}

/// One pair of alternative measurement directions per party.
struct PartySettings {
    EquatorialSetting unprimed;
    EquatorialSetting primed;
};

using SvetlichnySettings = std::vector<PartySettings>;

struct SvetlichnyResult {
    double value = 0.0;
    double biseparable_bound = 0.0; // 2^(N-1)
    double quantum_max = 0.0;       // 2^(N-1) * sqrt(2)
    double threshold = 0.0;         // bound * (1 + margin) used for the verdict
    bool violated = false;
    SvetlichnySettings settings;
};

namespace detail {

constexpr int kMaxWitnessParties = 6;

inline void check_witness_parties(int n) {
    if (n < 2 || n > kMaxWitnessParties) {
        throw SizeError("witness evaluation supported for 2..6 parties");
    }
}

} // namespace detail

/// Signs of the 2^N correlator terms of the N-party Svetlichny polynomial.
/// Bit i of the term index selects party i's primed setting.
///
/// The polynomial is grown by the Mermin-Klyshko recursion: with K_1 = A_1,
/// each new party contributes K_j = K_{j-1} (A_j + A'_j) + K~_{j-1} (A_j - A'_j),
/// where K~ swaps primed and unprimed settings everywhere. The witness is
/// K_N itself for even N and the symmetrized (K_N + K~_N)/2 for odd N,
/// rescaled to unit coefficients. For N=2 this is the CHSH combination
/// E(ab) + E(ab') + E(a'b) - E(a'b'), and for N=3 the eight-term polynomial
/// E(a'bc) + E(ab'c) + E(abc') - E(a'b'c') + E(ab'c') + E(a'bc') + E(a'b'c)
/// - E(abc). Local/biseparable models obey |S| <= 2^(N-1); quantum mechanics
/// obeys |S| <= 2^(N-1) sqrt(2), attained by GHZ states.
inline std::vector<int> svetlichny_coefficients(int n_parties) {
    detail::check_witness_parties(n_parties);
    std::vector<std::int64_t> k{1, 0};
    for (int j = 2; j <= n_parties; ++j) {
        const std::size_t half = k.size();
        std::vector<std::int64_t> next(half * 2);
        for (std::size_t x = 0; x < half; ++x) {
            const std::size_t flip = x ^ (half - 1);
            next[x] = k[x] + k[flip];
            next[x + half] = k[x] - k[flip];
        }
        k = std::move(next);
    }
    const std::size_t terms = k.size();
    std::vector<std::int64_t> s(terms);
    std::int64_t scale;
    if (n_parties % 2 == 0) {
        scale = std::int64_t{1} << ((n_parties - 2) / 2);
        for (std::size_t x = 0; x < terms; ++x) s[x] = k[x];
    } else {
        scale = std::int64_t{1} << ((n_parties - 1) / 2);
        for (std::size_t x = 0; x < terms; ++x) s[x] = k[x] + k[x ^ (terms - 1)];
    }
    std::vector<int> out(terms);
    for (std::size_t x = 0; x < terms; ++x) {
        if (s[x] % scale != 0 || std::abs(s[x] / scale) != 1) {
            throw Error("Svetlichny coefficient construction broke its +/-1 pattern");
        }
        out[x] = static_cast<int>(s[x] / scale);
    }
    return out;
}

/// Svetlichny polynomial value for explicit settings: the signed sum of the
/// 2^N equatorial correlators, one per primed/unprimed choice.
inline double svetlichny_value(const DensityOperator& rho, const SvetlichnySettings& settings) {
    const int n = rho.n_qubits();
    detail::check_witness_parties(n);
    if (static_cast<int>(settings.size()) != n) {
        throw DimensionError("one settings pair per party required");
    }
    const std::vector<int> coeff = svetlichny_coefficients(n);
    std::vector<EquatorialSetting> chosen(static_cast<std::size_t>(n));
    double value = 0.0;
    for (std::size_t x = 0; x < coeff.size(); ++x) {
        for (int i = 0; i < n; ++i) {
            const auto& party = settings[static_cast<std::size_t>(i)];
            chosen[static_cast<std::size_t>(i)] =
                ((x >> i) & 1u) ? party.primed : party.unprimed;
        }
        value += coeff[x] * correlator(rho, chosen);
    }
    return value;
}

struct WitnessConfig {
    int restarts = 32;
    double tolerance = 1e-8;
    double margin = 0.02; // relative: threshold = bound * (1 + margin)
    int max_sweeps = 200;
};

namespace detail {

/// Objective evaluation used by the optimizer. Identical maths to
/// svetlichny_value, with the anti-diagonal of rho and the coefficients
/// extracted once per subset instead of once per call.
class SvetlichnyObjective {
  public:
    explicit SvetlichnyObjective(const DensityOperator& rho)
        : n_(rho.n_qubits()), coeff_(svetlichny_coefficients(n_)) {
        const Label dim = Label{1} << n_;
        anti_diagonal_.resize(dim);
        for (Label b = 0; b < dim; ++b) {
            anti_diagonal_[b] = rho.matrix()(b, ~b & (dim - 1));
        }
    }

    int n_parties() const { return n_; }

    bool vanishes() const {
        for (const auto& d : anti_diagonal_) {
            if (std::abs(d) > 1e-14) return false;
        }
        return true;
    }

    /// angles laid out as [party0 unprimed, party0 primed, party1 unprimed, ...].
    double operator()(std::span<const double> angles) const {
        const Label dim = Label{1} << n_;
        double value = 0.0;
        for (std::size_t x = 0; x < coeff_.size(); ++x) {
            std::complex<double> acc{0.0, 0.0};
            for (Label b = 0; b < dim; ++b) {
                const std::complex<double>& d = anti_diagonal_[b];
                if (d == std::complex<double>{0.0, 0.0}) continue;
                double phase = 0.0;
                for (int q = 0; q < n_; ++q) {
                    const double phi =
                        angles[static_cast<std::size_t>(2 * q) + ((x >> q) & 1u)];
                    phase += ((b >> (n_ - 1 - q)) & 1u) ? -phi : phi;
                }
                acc += d * std::exp(std::complex<double>(0.0, phase));
            }
            value += coeff_[x] * acc.real();
        }
        return value;
    }

  private:
    int n_;
    std::vector<int> coeff_;
    std::vector<std::complex<double>> anti_diagonal_;
};

} // namespace detail

/// Maximizes |S| over equatorial settings by coordinate ascent from random
/// starts. The objective restricted to any single angle is
/// A cos(phi) + B sin(phi) + C, so each coordinate update is exact.
inline SvetlichnyResult max_svetlichny(const DensityOperator& rho, const WitnessConfig& config,
                                       Rng& rng) {
    const int n = rho.n_qubits();
    detail::check_witness_parties(n);
    const double bound = static_cast<double>(std::int64_t{1} << (n - 1));

    SvetlichnyResult result;
    result.biseparable_bound = bound;
    result.quantum_max = bound * std::numbers::sqrt2;
    result.threshold = bound * (1.0 + config.margin);
    result.settings.assign(static_cast<std::size_t>(n), PartySettings{});

    const detail::SvetlichnyObjective objective(rho);
    if (objective.vanishes()) {
        // Every equatorial correlator of this state is exactly zero.
        return result;
    }

    const std::size_t n_angles = static_cast<std::size_t>(2 * n);
    std::vector<double> angles(n_angles), best_angles(n_angles);
    double best = 0.0;
    bool have_best = false;
    for (int restart = 0; restart < std::max(1, config.restarts); ++restart) {
        for (auto& a : angles) a = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double current = objective(angles);
        for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
            const double before = current;
            for (std::size_t i = 0; i < n_angles; ++i) {
                const double saved = angles[i];
                angles[i] = 0.0;
                const double at0 = objective(angles);
                angles[i] = std::numbers::pi;
                const double at_pi = objective(angles);
                angles[i] = std::numbers::pi / 2.0;
                const double at_half = objective(angles);
                const double a = (at0 - at_pi) / 2.0;
                const double c = (at0 + at_pi) / 2.0;
                const double b = at_half - c;
                const double amp = std::hypot(a, b);
                if (amp < 1e-15) {
                    angles[i] = saved;
                    continue;
                }
                angles[i] = std::atan2(b, a);
                current = amp + c;
            }
            if (current - before < config.tolerance) break;
        }
        if (!have_best || current > best) {
            best = current;
            best_angles = angles;
            have_best = true;
        }
    }

    result.value = best;
    for (int q = 0; q < n; ++q) {
        result.settings[static_cast<std::size_t>(q)] = PartySettings{
            EquatorialSetting{best_angles[static_cast<std::size_t>(2 * q)]},
            EquatorialSetting{best_angles[static_cast<std::size_t>(2 * q) + 1]}};
    }
    result.violated = std::abs(result.value) > result.threshold;
    return result;
}

/// Decides genuine N-partite entanglement by witness violation: true iff the
/// optimized |S| exceeds 2^(N-1)(1 + margin). Violation is sufficient, not
/// necessary; on GHZ-family states it is decisive.
inline SvetlichnyResult is_genuinely_entangled(const DensityOperator& rho,
                                               const WitnessConfig& config, Rng& rng) {
    return max_svetlichny(rho, config, rng);
}

} // namespace qimem
