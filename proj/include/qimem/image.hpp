#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qimem/errors.hpp"
#include "qimem/state.hpp"

namespace qimem {

/// 2D qubit array: one qubit per grid cell, at most 30 cells.
struct Grid {
    int width = 0;
    int height = 0;

    int n_qubits() const { return width * height; }

    void validate() const {
        if (width < 1 || height < 1) throw SizeError("grid dimensions must be positive");
        if (n_qubits() > SparseState::kMaxQubits) {
            throw SizeError("grid of " + std::to_string(n_qubits()) +
                            " cells exceeds the " + std::to_string(SparseState::kMaxQubits) +
                            "-qubit limit");
        }
    }

    bool operator==(const Grid&) const = default;
};

/// Row-major cell-to-qubit mapping; (0,0) is qubit 0.
inline int qubit_index(const Grid& grid, int x, int y) {
    if (x < 0 || x >= grid.width || y < 0 || y >= grid.height) {
        throw CoordinateError("coordinate (" + std::to_string(x) + "," + std::to_string(y) +
                              ") outside " + std::to_string(grid.width) + "x" +
                              std::to_string(grid.height) + " grid");
    }
    return y * grid.width + x;
}

/// Polygon stored as its vertex set; edges and vertex order carry no
/// information in this memory model.
struct Shape {
    std::vector<std::pair<int, int>> vertices;

    void validate(const Grid& grid) const {
        if (vertices.size() < 2) {
            throw CoordinateError("a shape needs at least 2 vertices");
        }
        std::set<std::pair<int, int>> seen;
        for (const auto& [x, y] : vertices) {
            qubit_index(grid, x, y); // range check
            if (!seen.insert({x, y}).second) {
                throw CoordinateError("duplicate vertex (" + std::to_string(x) + "," +
                                      std::to_string(y) + ")");
            }
        }
    }

    std::vector<int> qubit_indices(const Grid& grid) const {
        std::vector<int> idx;
        idx.reserve(vertices.size());
        for (const auto& [x, y] : vertices) idx.push_back(qubit_index(grid, x, y));
        std::sort(idx.begin(), idx.end());
        return idx;
    }
};

enum class StorageMode { classical, entangled };

inline std::string to_string(StorageMode m) {
    return m == StorageMode::classical ? "classical" : "entangled";
}

struct StoredImage {
    Grid grid;
    std::vector<Shape> shapes;
    StorageMode mode = StorageMode::entangled;

    void validate() const {
        grid.validate();
        for (const auto& s : shapes) s.validate(grid);
        if (mode == StorageMode::entangled) {
            std::set<int> used;
            for (const auto& s : shapes) {
                for (int q : s.qubit_indices(grid)) {
                    if (!used.insert(q).second) {
                        throw OverlapError("shapes share vertex qubit " + std::to_string(q) +
                                           "; entangled storage needs disjoint vertex sets");
                    }
                }
            }
        }
    }
};

/// A-priori metadata kept alongside the quantum state (classically, not in
/// qubits): how many shapes are stored and how many vertices each has.
struct ImageHeader {
    std::vector<int> vertex_counts;

    int shape_count() const { return static_cast<int>(vertex_counts.size()); }
};

/// A prepared qubit-array memory: the state itself plus the image it encodes
/// and the retrieval header.
struct MemoryState {
    SparseState state;
    Grid grid;
    StorageMode mode;
    ImageHeader header;
};

namespace detail {

inline Label shape_mask(const SparseState& s, const Grid& grid, const Shape& shape) {
    Label mask = 0;
    for (int q : shape.qubit_indices(grid)) mask |= s.qubit_mask(q);
    return mask;
}

inline ImageHeader header_of(const StoredImage& image) {
    ImageHeader h;
    for (const auto& s : image.shapes) h.vertex_counts.push_back(static_cast<int>(s.vertices.size()));
    return h;
}

} // namespace detail

/// Classical storage: every vertex qubit is set to |1>, all others stay |0>.
/// Shapes may overlap; their bits simply merge, which is exactly why this
/// mode cannot tell which vertices belong to which shape.
inline MemoryState store_classical(const StoredImage& image) {
    if (image.mode != StorageMode::classical) {
        throw OperatorError("store_classical requires classical mode");
    }
    image.validate();
    const int n = image.grid.n_qubits();
    SparseState probe = SparseState::zero(n);
    Label label = 0;
    for (const auto& shape : image.shapes) label |= detail::shape_mask(probe, image.grid, shape);
    SparseState::AmplitudeMap amps;
    amps.emplace(label, Amplitude{1.0, 0.0});
    return MemoryState{SparseState::from_amplitudes(n, std::move(amps)), image.grid,
                       StorageMode::classical, detail::header_of(image)};
}

/// Classical storage of raw marked cells (e.g. the black pixels of a bitmap,
/// with no shape grouping known).
inline MemoryState store_classical_cells(const Grid& grid, std::span<const int> cells) {
    grid.validate();
    const int n = grid.n_qubits();
    SparseState probe = SparseState::zero(n);
    Label label = 0;
    for (int q : cells) {
        if (q < 0 || q >= n) throw IndexError("cell index out of range");
        label |= probe.qubit_mask(q);
    }
    SparseState::AmplitudeMap amps;
    amps.emplace(label, Amplitude{1.0, 0.0});
    return MemoryState{SparseState::from_amplitudes(n, std::move(amps)), grid,
                       StorageMode::classical, ImageHeader{}};
}

/// Entangled storage: each shape's vertex qubits are prepared in a GHZ state
/// and all other qubits stay |0>, giving the product-of-GHZ-factors memory.
/// The sparse support has one label per subset of shapes (2^k entries for k
/// shapes), each with amplitude 2^(-k/2).
inline MemoryState store_entangled(const StoredImage& image) {
    if (image.mode != StorageMode::entangled) {
        throw OperatorError("store_entangled requires entangled mode");
    }
    image.validate();
    const int n = image.grid.n_qubits();
    const std::size_t k = image.shapes.size();
    SparseState probe = SparseState::zero(n);
    std::vector<Label> masks;
    masks.reserve(k);
    for (const auto& shape : image.shapes) {
        masks.push_back(detail::shape_mask(probe, image.grid, shape));
    }
    double amp = 1.0;
    for (std::size_t i = 0; i < k; ++i) amp /= std::numbers::sqrt2;
    SparseState::AmplitudeMap amps;
    for (std::size_t subset = 0; subset < (std::size_t{1} << k); ++subset) {
        Label label = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if ((subset >> i) & 1u) label |= masks[i];
        }
        amps.emplace(label, Amplitude{amp, 0.0});
    }
    return MemoryState{SparseState::from_amplitudes(n, std::move(amps)), image.grid,
                       StorageMode::entangled, detail::header_of(image)};
}

/// Memory with nothing stored: every qubit in |0>.
inline MemoryState empty_memory(const Grid& grid, StorageMode mode = StorageMode::entangled) {
    grid.validate();
    return MemoryState{SparseState::zero(grid.n_qubits()), grid, mode, ImageHeader{}};
}

/// Inner product of two memories on the same grid. Memory states of
/// different images are nonorthogonal (they all share the all-zeros label),
/// which is why projector-based readout cannot distinguish them reliably.
inline Amplitude overlap(const MemoryState& a, const MemoryState& b) {
    if (!(a.grid == b.grid)) throw DimensionError("memories live on different grids");
    return inner(a.state, b.state);
}

/// Probability of the projector onto (GHZ on `vertex_qubits`) x (|0> on the
/// rest): |<GHZ, 0...0 | psi>|^2.
inline double ghz_projector_probability(const MemoryState& m, std::span<const int> vertex_qubits) {
    const SparseState& s = m.state;
    if (vertex_qubits.empty()) throw IndexError("vertex set must be nonempty");
    Label mask = 0;
    std::set<int> distinct;
    for (int q : vertex_qubits) {
        if (q < 0 || q >= s.n_qubits()) throw IndexError("vertex qubit out of range");
        if (!distinct.insert(q).second) throw IndexError("duplicate vertex qubit");
        mask |= s.qubit_mask(q);
    }
    const Amplitude bra = (s.amplitude(Label{0}) + s.amplitude(mask)) / std::numbers::sqrt2;
    return std::norm(bra);
}

} // namespace qimem
