#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <span>
#include <vector>

#include "qimem/errors.hpp"
#include "qimem/image.hpp"
#include "qimem/rng.hpp"

namespace qimem {

/// Search oracle over a power-of-two address space. Real grid cells occupy
/// addresses [0, n_cells); the remaining padding addresses are never marked.
struct OracleSpec {
    std::uint64_t address_space_size = 0; // power of two
    std::uint64_t n_cells = 0;            // real cells, <= address_space_size
    std::vector<std::uint64_t> marked;    // sorted, distinct, all < n_cells

    static OracleSpec for_cells(std::uint64_t n_cells, std::vector<std::uint64_t> marked) {
        if (n_cells == 0) throw OracleError("empty address space");
        OracleSpec spec;
        spec.n_cells = n_cells;
        spec.address_space_size = std::bit_ceil(n_cells);
        std::sort(marked.begin(), marked.end());
        marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
        for (std::uint64_t a : marked) {
            if (a >= n_cells) throw OracleError("marked address outside the grid");
        }
        spec.marked = std::move(marked);
        return spec;
    }
};

/// Exact success probability of Grover search after t iterations with m
/// marked items in a space of size p: sin^2((2t+1) asin(sqrt(m/p))).
inline double grover_success_probability(std::uint64_t p, std::uint64_t m, long t) {
    const double theta = std::asin(std::sqrt(static_cast<double>(m) / static_cast<double>(p)));
    const double s = std::sin(static_cast<double>(2 * t + 1) * theta);
    return s * s;
}

/// Iteration count for m marked items in a space of size n: both the floor
/// and the ceiling of (pi/4) sqrt(n/m) are evaluated exactly and the more
/// successful one wins (at least one iteration is always performed).
inline long grover_iterations(std::uint64_t n, std::uint64_t m) {
    if (m == 0) throw OracleError("no marked items");
    if (m > n) throw OracleError("more marked items than addresses");
    const double ideal =
        std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(m));
    const long lo = std::max(1L, static_cast<long>(std::floor(ideal)));
    const long hi = std::max(1L, static_cast<long>(std::ceil(ideal)));
    return grover_success_probability(n, m, lo) >= grover_success_probability(n, m, hi) ? lo : hi;
}

struct GroverRun {
    long iterations = 0;
    double success_probability = 0.0;
    std::uint64_t sampled_address = 0;
    bool hit = false; // sampled address verified to be marked
};

namespace detail {

/// Amplitudes of marked and unmarked addresses after t Grover iterations.
/// All marked (and all unmarked) amplitudes stay equal throughout, so the
/// whole evolution reduces to a two-amplitude recursion: phase-flip the
/// marked amplitude, then invert both about the mean.
struct GroverAmplitudes {
    double marked = 0.0;
    double unmarked = 0.0;
};

inline GroverAmplitudes grover_amplitudes(std::uint64_t p, std::uint64_t m, long t) {
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(p));
    GroverAmplitudes a{inv_sqrt, inv_sqrt};
    const double fm = static_cast<double>(m);
    const double fu = static_cast<double>(p - m);
    for (long i = 0; i < t; ++i) {
        a.marked = -a.marked;
        const double mean = (fm * a.marked + fu * a.unmarked) / static_cast<double>(p);
        a.marked = 2.0 * mean - a.marked;
        a.unmarked = 2.0 * mean - a.unmarked;
    }
    return a;
}

} // namespace detail

/// One amplitude-amplification run: uniform initialization, the chosen
/// number of iterations, then one sample from the final distribution.
inline GroverRun grover_search(const OracleSpec& oracle, Rng& rng) {
    const std::uint64_t p = oracle.address_space_size;
    const std::uint64_t m = oracle.marked.size();
    if (m == 0) throw OracleError("no marked items");

    GroverRun run;
    run.iterations = grover_iterations(p, m);
    const auto amps = detail::grover_amplitudes(p, m, run.iterations);
    run.success_probability = static_cast<double>(m) * amps.marked * amps.marked;

    const double u = rng.uniform();
    if (u < run.success_probability) {
        run.sampled_address = oracle.marked[static_cast<std::size_t>(rng.below(m))];
    } else {
        // j-th unmarked address, skipping over the sorted marked list.
        std::uint64_t j = rng.below(p - m);
        std::uint64_t addr = j;
        for (std::uint64_t marked_addr : oracle.marked) {
            if (marked_addr <= addr) ++addr;
        }
        run.sampled_address = addr;
    }
    run.hit = std::binary_search(oracle.marked.begin(), oracle.marked.end(), run.sampled_address);
    return run;
}

struct GroverRetrieval {
    std::vector<std::uint64_t> found; // sorted
    bool complete = false;
    std::vector<GroverRun> runs;
    long long oracle_queries = 0; // one per iteration plus one verification per run
};

/// Recovers all marked cells by repeated Grover search with verification:
/// every sampled address is checked against the stored bit (one oracle
/// query) and collected if marked, until the whole set is found or
/// max_repeats runs are exhausted (an incomplete result, not an error).
inline GroverRetrieval locate_marked_cells(std::uint64_t n_cells,
                                           std::span<const std::uint64_t> marked, Rng& rng,
                                           int max_repeats = 1000) {
    GroverRetrieval result;
    if (marked.empty()) {
        result.complete = true;
        return result;
    }
    const OracleSpec oracle =
        OracleSpec::for_cells(n_cells, std::vector<std::uint64_t>(marked.begin(), marked.end()));
    std::set<std::uint64_t> found;
    for (int repeat = 0; repeat < max_repeats && found.size() < oracle.marked.size(); ++repeat) {
        GroverRun run = grover_search(oracle, rng);
        result.oracle_queries += run.iterations + 1;
        if (run.hit) found.insert(run.sampled_address);
        result.runs.push_back(run);
    }
    result.found.assign(found.begin(), found.end());
    result.complete = found.size() == oracle.marked.size();
    return result;
}

/// Marked-cell recovery for a classically stored memory: the marked set is
/// read off the single stored basis label. Entangled memories cannot be
/// searched this way (superposed supports would be sampled incoherently);
/// they are retrieved by entanglement witnessing instead.
inline GroverRetrieval locate_vertices_classical(const MemoryState& memory, Rng& rng,
                                                 int max_repeats = 1000) {
    if (memory.mode != StorageMode::classical) {
        throw OracleError("Grover retrieval requires a classical memory; "
                          "use witness-based retrieval for entangled storage");
    }
    if (memory.state.size() != 1) {
        throw OracleError("classical memory must hold exactly one basis state");
    }
    const Label label = memory.state.amplitudes().begin()->first;
    const int n = memory.state.n_qubits();
    std::vector<std::uint64_t> marked;
    for (int q = 0; q < n; ++q) {
        if (memory.state.bit(label, q)) marked.push_back(static_cast<std::uint64_t>(q));
    }
    return locate_marked_cells(static_cast<std::uint64_t>(n), marked, rng, max_repeats);
}

} // namespace qimem
