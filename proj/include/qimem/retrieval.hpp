#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qimem/density.hpp"
#include "qimem/entanglement.hpp"
#include "qimem/errors.hpp"
#include "qimem/image.hpp"
#include "qimem/measurement.hpp"
#include "qimem/rng.hpp"

namespace qimem {

/// Lexicographic enumeration of the k-element subsets of {0, ..., n-1}.
class SubsetEnumerator {
  public:
    SubsetEnumerator(int n, int k) : n_(n), k_(k), current_(static_cast<std::size_t>(k)) {
        if (k < 1 || k > n) {
            throw SizeError("subset size " + std::to_string(k) + " outside 1.." +
                            std::to_string(n));
        }
        std::iota(current_.begin(), current_.end(), 0);
    }

    bool done() const { return done_; }
    const std::vector<int>& current() const { return current_; }

    void advance() {
        int i = k_ - 1;
        while (i >= 0 && current_[static_cast<std::size_t>(i)] == n_ - k_ + i) --i;
        if (i < 0) {
            done_ = true;
            return;
        }
        ++current_[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k_; ++j) {
            current_[static_cast<std::size_t>(j)] = current_[static_cast<std::size_t>(j - 1)] + 1;
        }
    }

  private:
    int n_;
    int k_;
    std::vector<int> current_;
    bool done_ = false;
};

/// Materialized candidate list, mostly for tests and parallel dispatch.
inline std::vector<std::vector<int>> enumerate_candidates(int n, int k) {
    std::vector<std::vector<int>> out;
    for (SubsetEnumerator e(n, k); !e.done(); e.advance()) out.push_back(e.current());
    return out;
}

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

/// Worst-case number of identically-prepared arrays needed to locate a known
/// shape inventory by subset testing: each shape multiplies in a binomial
/// over the cells not yet claimed by earlier shapes. Two triangles in a
/// 16-cell array give C(16,3) * C(13,3) = 160160.
inline long long worst_case_arrays(int n, std::span<const int> vertex_counts) {
    int used = 0;
    long long product = 1;
    for (int count : vertex_counts) {
        if (count < 1) throw CapacityError("shape vertex counts must be positive");
        used += count;
        if (used > n) {
            throw CapacityError("shape inventory needs " + std::to_string(used) +
                                " cells, grid has " + std::to_string(n));
        }
        const long long choices = binomial(n - (used - count), count);
        if (__builtin_mul_overflow(product, choices, &product)) {
            throw CapacityError("worst-case array count overflows");
        }
    }
    return product;
}

struct RetrievalConfig {
    enum class Mode { exact, shots };

    Mode mode = Mode::exact;
    long shots_per_correlator = 4096; // shots mode only; must be >= 100
    /// Expected shape inventory (vertex count per shape, with multiplicity).
    /// Empty means: take it from the memory header, and if that is empty too,
    /// probe every size from max_probe down to 2.
    std::vector<int> vertex_counts;
    int max_probe = 5;
    double margin = 0.02;
    int optimizer_restarts = 32;
    bool skip_found = true;
    int workers = 1;
    std::uint64_t seed = 0;

    double effective_margin() const {
        if (mode == Mode::shots) {
            return std::max(margin, 5.0 / std::sqrt(static_cast<double>(shots_per_correlator)));
        }
        return margin;
    }
};

struct SubsetTest {
    std::vector<int> qubits;
    SvetlichnyResult result;
    long long preparations = 0;
};

struct RetrievalReport {
    Grid grid;
    RetrievalConfig::Mode mode = RetrievalConfig::Mode::exact;
    std::vector<int> probed_counts;             // inventory used for the cost bound
    std::vector<std::vector<int>> found_shapes; // pairwise disjoint vertex-index sets
    std::vector<SubsetTest> tests;
    long long total_preparations = 0;
    long long worst_case_bound = 0;
};

using MemoryOracle = std::function<MemoryState()>;

namespace detail {

inline bool intersects(std::span<const int> subset, const std::vector<std::vector<int>>& found) {
    for (const auto& shape : found) {
        for (int q : subset) {
            if (std::binary_search(shape.begin(), shape.end(), q)) return true;
        }
    }
    return false;
}

inline std::string subset_string(std::span<const int> subset) {
    std::string s = "{";
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(subset[i]);
    }
    return s + "}";
}

/// Stable per-subset seed: identical whether or not other subsets were
/// skipped, and identical across worker counts.
inline std::uint64_t subset_seed(std::uint64_t base, int size, long long rank) {
    return derive_seed(base, (static_cast<std::uint64_t>(size) << 40) ^
                                 static_cast<std::uint64_t>(rank));
}

inline SubsetTest run_exact_test(const MemoryState& memory, const std::vector<int>& subset,
                                 const RetrievalConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    const DensityOperator reduced = partial_trace(memory.state, subset);
    WitnessConfig wc;
    wc.restarts = config.optimizer_restarts;
    wc.margin = config.effective_margin();
    SubsetTest test{subset, is_genuinely_entangled(reduced, wc, rng), 0};
    return test;
}

inline SubsetTest run_shot_test(const MemoryOracle& prepare, const std::vector<int>& subset,
                                const RetrievalConfig& config,
                                const SvetlichnySettings& reference, std::uint64_t seed) {
    Rng rng(seed);
    const int n = static_cast<int>(subset.size());
    const std::vector<int> coeff = svetlichny_coefficients(n);
    const double bound = static_cast<double>(1LL << (n - 1));
    const double margin = config.effective_margin();

    PreparationOracle state_oracle = [&prepare] { return prepare().state; };
    std::vector<EquatorialSetting> chosen(static_cast<std::size_t>(n));
    double value = 0.0;
    for (std::size_t x = 0; x < coeff.size(); ++x) {
        for (int i = 0; i < n; ++i) {
            const auto& party = reference[static_cast<std::size_t>(i)];
            chosen[static_cast<std::size_t>(i)] = ((x >> i) & 1u) ? party.primed : party.unprimed;
        }
        value += coeff[x] * sample_correlator(state_oracle, subset, chosen,
                                              config.shots_per_correlator, rng);
    }

    SvetlichnyResult result;
    result.value = value;
    result.biseparable_bound = bound;
    result.quantum_max = bound * std::numbers::sqrt2;
    result.threshold = bound * (1.0 + margin);
    result.violated = std::abs(value) > result.threshold;
    result.settings = reference;
    const long long preparations =
        (1LL << n) * static_cast<long long>(config.shots_per_correlator);
    return SubsetTest{subset, std::move(result), preparations};
}

} // namespace detail

/// Reconstructs the stored shapes of a memory by testing qubit subsets for
/// genuine multipartite entanglement.
///
/// Sizes are probed largest first. Subsets intersecting an already-found
/// shape are skipped by default (stored shapes are disjoint, and marginals
/// of a larger GHZ factor cannot violate the witness anyway). In exact mode
/// each subset's reduced state feeds the witness optimizer and consumes no
/// preparations; in shot mode each subset is tested at fixed GHZ-optimal
/// settings and every single-setting shot consumes one fresh preparation,
/// 2^N * shots per subset.
///
/// A violating subset that overlaps an earlier finding (possible only with
/// skipping disabled) is contradictory evidence and raises ConsistencyError
/// rather than being resolved silently.
inline RetrievalReport find_shapes(const MemoryOracle& prepare, const Grid& grid,
                                   const RetrievalConfig& config) {
    if (config.mode == RetrievalConfig::Mode::shots && config.shots_per_correlator < 100) {
        throw SizeError("shot mode needs at least 100 shots per correlator");
    }
    if (config.workers < 1) throw SizeError("worker count must be positive");
    const MemoryState first = prepare();
    if (!(first.grid == grid)) throw DimensionError("prepared memory is on a different grid");
    const int n = grid.n_qubits();

    std::vector<int> inventory = config.vertex_counts;
    if (inventory.empty()) inventory = first.header.vertex_counts;
    bool assumed_inventory = !inventory.empty();
    std::vector<int> sizes;
    if (assumed_inventory) {
        sizes = inventory;
    } else {
        for (int k = std::min(config.max_probe, n); k >= 2; --k) sizes.push_back(k);
        inventory = sizes;
    }
    if (sizes.empty()) throw SizeError("no subset sizes to probe");
    std::sort(sizes.begin(), sizes.end(), std::greater<int>());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    for (int k : sizes) {
        if (k < 2 || k > detail::kMaxWitnessParties) {
            throw SizeError("probe size " + std::to_string(k) + " outside 2.." +
                            std::to_string(detail::kMaxWitnessParties));
        }
        if (k > n) throw CapacityError("probe size exceeds grid size");
    }

    RetrievalReport report;
    report.grid = grid;
    report.mode = config.mode;
    report.probed_counts = inventory;
    std::sort(report.probed_counts.begin(), report.probed_counts.end(), std::greater<int>());
    if (assumed_inventory) {
        report.worst_case_bound = worst_case_arrays(n, report.probed_counts);
    } else {
        // No inventory assumed: at worst every subset of every probed size.
        long long sum = 0;
        for (int k : sizes) sum += binomial(n, k);
        report.worst_case_bound = sum;
    }

    // Shot mode measures every subset at the witness-optimal angles for the
    // GHZ state of its size, found once per size on the exact GHZ state.
    std::map<int, SvetlichnySettings> reference;
    if (config.mode == RetrievalConfig::Mode::shots) {
        for (int k : sizes) {
            Rng rng(derive_seed(config.seed, 0xA11C0FFEULL + static_cast<std::uint64_t>(k)));
            WitnessConfig wc;
            wc.restarts = config.optimizer_restarts;
            wc.margin = config.effective_margin();
            reference[k] =
                max_svetlichny(to_density(make_ghz(k)), wc, rng).settings;
        }
    }

    auto run_test = [&](const std::vector<int>& subset, long long rank) {
        const std::uint64_t seed =
            detail::subset_seed(config.seed, static_cast<int>(subset.size()), rank);
        if (config.mode == RetrievalConfig::Mode::exact) {
            return detail::run_exact_test(first, subset, config, seed);
        }
        return detail::run_shot_test(prepare, subset, config,
                                     reference.at(static_cast<int>(subset.size())), seed);
    };

    auto record = [&](SubsetTest test) {
        if (test.result.violated) {
            std::vector<int> shape = test.qubits;
            if (detail::intersects(shape, report.found_shapes)) {
                throw ConsistencyError("violating subset " + detail::subset_string(shape) +
                                       " overlaps an already-found shape");
            }
            report.found_shapes.push_back(std::move(shape));
        }
        report.total_preparations += test.preparations;
        report.tests.push_back(std::move(test));
    };

    for (int k : sizes) {
        if (config.workers == 1) {
            long long rank = 0;
            for (SubsetEnumerator e(n, k); !e.done(); e.advance(), ++rank) {
                if (config.skip_found && detail::intersects(e.current(), report.found_shapes)) {
                    continue;
                }
                record(run_test(e.current(), rank));
            }
        } else {
            // Parallel path: evaluate all candidates up front with per-subset
            // seeds, then replay them in lexicographic order so that skipping,
            // accounting and the report are identical to the sequential path.
            const std::vector<std::vector<int>> candidates = enumerate_candidates(n, k);
            std::vector<std::optional<SubsetTest>> results(candidates.size());
            std::atomic<std::size_t> cursor{0};
            auto worker = [&] {
                for (;;) {
                    const std::size_t i = cursor.fetch_add(1);
                    if (i >= candidates.size()) return;
                    results[i] = run_test(candidates[i], static_cast<long long>(i));
                }
            };
            std::vector<std::thread> pool;
            for (int w = 0; w < config.workers; ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (config.skip_found && detail::intersects(candidates[i], report.found_shapes)) {
                    continue;
                }
                record(std::move(*results[i]));
            }
        }
    }
    return report;
}

/// Vertex counts of the found shapes, sorted: the scale- and
/// position-independent fingerprint of the stored image.
inline std::vector<int> recognize_scale_invariant(const RetrievalReport& report) {
    std::vector<int> counts;
    counts.reserve(report.found_shapes.size());
    for (const auto& shape : report.found_shapes) counts.push_back(static_cast<int>(shape.size()));
    std::sort(counts.begin(), counts.end());
    return counts;
}

struct SimilarityRecord {
    std::vector<int> shared_vertex_counts; // multiset intersection, sorted
    bool same_grid = false;
    int exact_matches = 0; // identical vertex sets, only meaningful on equal grids
    bool identical = false;
};

/// Compares two retrieval results: shape-level similarity by vertex counts
/// (scale invariant) and exact vertex-set matches when grids coincide.
inline SimilarityRecord compare_memories(const RetrievalReport& a, const RetrievalReport& b) {
    SimilarityRecord rec;
    std::vector<int> ca = recognize_scale_invariant(a);
    std::vector<int> cb = recognize_scale_invariant(b);
    std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(),
                          std::back_inserter(rec.shared_vertex_counts));
    rec.same_grid = a.grid == b.grid;
    if (rec.same_grid) {
        std::set<std::vector<int>> sets_a(a.found_shapes.begin(), a.found_shapes.end());
        for (const auto& shape : b.found_shapes) {
            if (sets_a.count(shape)) ++rec.exact_matches;
        }
        rec.identical = sets_a.size() == b.found_shapes.size() &&
                        rec.exact_matches == static_cast<int>(b.found_shapes.size());
    }
    return rec;
}

} // namespace qimem
