#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qimem/entanglement.hpp"
#include "qimem/io.hpp"
#include "qimem/state.hpp"

using namespace qimem;

namespace {

SparseState state_of(int n, std::initializer_list<std::pair<const char*, Amplitude>> entries) {
    SparseState::AmplitudeMap amps;
    for (const auto& [bits, amp] : entries) amps.emplace(SparseState::parse_label(bits), amp);
    return SparseState::from_amplitudes(n, std::move(amps));
}

} // namespace

TEST_CASE("zero state has a single all-zeros amplitude") {
    const SparseState s = SparseState::zero(3);
    REQUIRE(s.size() == 1);
    REQUIRE(s.amplitude(SparseState::parse_label("000")) == Amplitude{1.0, 0.0});

    const SparseState single = SparseState::zero(1);
    REQUIRE(single.size() == 1);
    REQUIRE(single.amplitude(0) == Amplitude{1.0, 0.0});

    REQUIRE(inner(SparseState::zero(4), SparseState::zero(4)) == Amplitude{1.0, 0.0});
}

TEST_CASE("qubit counts outside 1..30 are rejected") {
    REQUIRE_THROWS_AS(SparseState::zero(0), SizeError);
    REQUIRE_THROWS_AS(SparseState::zero(31), SizeError);
    REQUIRE_NOTHROW(SparseState::zero(30));
}

TEST_CASE("construction validates labels, finiteness and normalization") {
    SparseState::AmplitudeMap bad_label;
    bad_label.emplace(Label{4}, Amplitude{1.0, 0.0});
    REQUIRE_THROWS_AS(SparseState::from_amplitudes(2, std::move(bad_label)), IndexError);

    SparseState::AmplitudeMap bad_norm;
    bad_norm.emplace(Label{0}, Amplitude{0.5, 0.0});
    REQUIRE_THROWS_AS(SparseState::from_amplitudes(1, std::move(bad_norm)), NormalizationError);

    SparseState::AmplitudeMap nan_amp;
    nan_amp.emplace(Label{0}, Amplitude{std::nan(""), 0.0});
    REQUIRE_THROWS_AS(SparseState::from_amplitudes(1, std::move(nan_amp)), NormalizationError);

    // Entries below the pruning threshold are dropped.
    SparseState::AmplitudeMap with_dust;
    with_dust.emplace(Label{0}, Amplitude{1.0, 0.0});
    with_dust.emplace(Label{1}, Amplitude{1e-16, 0.0});
    const SparseState s = SparseState::from_amplitudes(1, std::move(with_dust));
    REQUIRE(s.size() == 1);
}

TEST_CASE("labels are written with qubit 0 leftmost") {
    const SparseState s = state_of(3, {{"011", Amplitude{1.0, 0.0}}});
    const Label l = s.amplitudes().begin()->first;
    REQUIRE(s.label_string(l) == "011");
    REQUIRE_FALSE(s.bit(l, 0));
    REQUIRE(s.bit(l, 1));
    REQUIRE(s.bit(l, 2));
    REQUIRE(SparseState::parse_label("011") == 3u);
}

TEST_CASE("tensor concatenates labels and multiplies amplitudes") {
    const SparseState a = state_of(1, {{"0", Amplitude{1.0, 0.0}}});
    const SparseState b = state_of(1, {{"1", Amplitude{1.0, 0.0}}});
    const SparseState ab = tensor(a, b);
    REQUIRE(ab.n_qubits() == 2);
    REQUIRE(ab.size() == 1);
    REQUIRE(ab.amplitude(SparseState::parse_label("01")) == Amplitude{1.0, 0.0});
}

TEST_CASE("tensor of GHZ3 with |0> matches the dense Kronecker product") {
    const SparseState ghz = make_ghz(3);
    const SparseState product = tensor(ghz, SparseState::zero(1));
    REQUIRE(product.size() == 2);

    const oracle::CVec expected = oracle::kron(oracle::to_cvec(ghz), {{1.0, 0.0}, {0.0, 0.0}});
    const oracle::CVec actual = oracle::to_cvec(product);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        REQUIRE(std::abs(expected[i] - actual[i]) < 1e-15);
    }
    const double r = 1.0 / std::numbers::sqrt2;
    REQUIRE(std::abs(product.amplitude(SparseState::parse_label("0000")) - r) < 1e-15);
    REQUIRE(std::abs(product.amplitude(SparseState::parse_label("1110")) - r) < 1e-15);
}

TEST_CASE("tensor preserves normalization for random states") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const SparseState a = oracle::random_state(3, rng);
        const SparseState b = oracle::random_state(2, rng);
        const SparseState ab = tensor(a, b);
        REQUIRE(std::abs(inner(ab, ab).real() - 1.0) < 1e-12);
        REQUIRE(std::abs(inner(ab, ab).imag()) < 1e-14);
    }
}

TEST_CASE("tensor rejects products beyond 30 qubits") {
    REQUIRE_THROWS_AS(tensor(SparseState::zero(16), SparseState::zero(15)), SizeError);
}

TEST_CASE("inner products") {
    const SparseState one = state_of(1, {{"1", Amplitude{1.0, 0.0}}});
    REQUIRE(inner(one, one) == Amplitude{1.0, 0.0});

    const SparseState zero = SparseState::zero(1);
    REQUIRE(inner(zero, one) == Amplitude{0.0, 0.0});

    REQUIRE_THROWS_AS(inner(SparseState::zero(2), SparseState::zero(3)), DimensionError);
}

TEST_CASE("inner product is conjugate-linear in the first argument") {
    Rng rng(5);
    const SparseState a = oracle::random_state(3, rng);
    const SparseState b = oracle::random_state(3, rng);
    const Amplitude via_oracle = oracle::inner(oracle::to_cvec(a), oracle::to_cvec(b));
    REQUIRE(std::abs(inner(a, b) - via_oracle) < 1e-14);
    REQUIRE(std::abs(inner(b, a) - std::conj(inner(a, b))) < 1e-14);
}

TEST_CASE("overlap of the empty memory with a one-triangle memory is 1/sqrt(2)") {
    // 3x3 grid, triangle vertices at qubits 0, 2, 7.
    const SparseState initial = SparseState::zero(9);
    const double r = 1.0 / std::numbers::sqrt2;
    const SparseState one_triangle = state_of(
        9, {{"000000000", Amplitude{r, 0.0}}, {"101000010", Amplitude{r, 0.0}}});
    const Amplitude got = inner(initial, one_triangle);
    REQUIRE(std::abs(got - Amplitude{r, 0.0}) < 1e-15);
    const Amplitude via_oracle =
        oracle::inner(oracle::to_cvec(initial), oracle::to_cvec(one_triangle));
    REQUIRE(std::abs(got - via_oracle) < 1e-15);
}

TEST_CASE("dense round trip is the identity") {
    Rng rng(7);
    for (int n : {1, 3, 5}) {
        const SparseState s = oracle::random_state(n, rng);
        const std::vector<Amplitude> dense = to_dense(s);
        const SparseState back = from_dense(n, dense);
        REQUIRE(back.size() == s.size());
        for (const auto& [l, a] : s.amplitudes()) {
            REQUIRE(std::abs(back.amplitude(l) - a) < 1e-15);
        }
    }
    REQUIRE_THROWS_AS(to_dense(SparseState::zero(13)), SizeError);
}

TEST_CASE("state text dump is sorted by label") {
    std::ostringstream out;
    write_state_text(make_ghz(3), out);
    REQUIRE(out.str() == "000 0.70710678118654746 0\n"
                         "111 0.70710678118654746 0\n");
}
