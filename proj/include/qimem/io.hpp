#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qimem/errors.hpp"
#include "qimem/image.hpp"
#include "qimem/state.hpp"

namespace qimem {

inline std::string format_double(double v, int precision = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

/// Debug text dump of a state: one `label amplitude_re amplitude_im` line
/// per stored amplitude, sorted by label.
inline void write_state_text(const SparseState& s, std::ostream& out) {
    for (const auto& [label, amp] : s.amplitudes()) {
        out << s.label_string(label) << ' ' << format_double(amp.real()) << ' '
            << format_double(amp.imag()) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Binary images: PBM "P1" (ASCII bitmap).
// ---------------------------------------------------------------------------

/// Raw binary image; unlike Grid this is not tied to the 30-qubit limit,
/// since Grover search over the address space works on plain bitmaps.
struct Bitmap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major, 1 = black

    bool pixel(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)] != 0;
    }

    std::vector<std::uint64_t> black_cells() const {
        std::vector<std::uint64_t> cells;
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            if (pixels[i]) cells.push_back(static_cast<std::uint64_t>(i));
        }
        return cells;
    }
};

namespace detail {

/// Reads the next PBM token, skipping whitespace and # comments.
inline bool next_pbm_token(std::istream& in, std::string& token, int& line) {
    token.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            if (c == '\n') ++line;
            continue;
        }
        if (c == '\n') {
            ++line;
            continue;
        }
        if (std::isspace(c)) continue;
        break;
    }
    if (c == EOF) return false;
    token.push_back(static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
    }
    if (c == '\n') ++line;
    if (c == '#') in.unget();
    return true;
}

inline int parse_int(const std::string& token, const char* what, int line) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("expected ") + what + ", got \"" + token + "\"", line);
    }
}

} // namespace detail

inline Bitmap read_pbm(std::istream& in) {
    int line = 1;
    std::string token;
    if (!detail::next_pbm_token(in, token, line) || token != "P1") {
        throw ParseError("expected PBM magic \"P1\", got \"" + token + "\"", 1);
    }
    if (!detail::next_pbm_token(in, token, line)) throw ParseError("missing width", line);
    const int width = detail::parse_int(token, "width", line);
    if (!detail::next_pbm_token(in, token, line)) throw ParseError("missing height", line);
    const int height = detail::parse_int(token, "height", line);
    if (width < 1 || height < 1) throw ParseError("image dimensions must be positive", line);

    Bitmap bmp;
    bmp.width = width;
    bmp.height = height;
    bmp.pixels.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (long i = 0; i < static_cast<long>(width) * height; ++i) {
        if (!detail::next_pbm_token(in, token, line)) {
            throw ParseError("unexpected end of pixel data", line);
        }
        // P1 allows pixels to be packed without separators ("0110").
        for (char c : token) {
            if (c != '0' && c != '1') {
                throw ParseError(std::string("invalid pixel character \"") + c + "\"", line);
            }
            bmp.pixels.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        i += static_cast<long>(token.size()) - 1;
    }
    if (bmp.pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ParseError("pixel data does not match image dimensions", line);
    }
    return bmp;
}

inline void write_pbm(const Bitmap& bmp, std::ostream& out) {
    out << "P1\n" << bmp.width << ' ' << bmp.height << '\n';
    for (int y = 0; y < bmp.height; ++y) {
        for (int x = 0; x < bmp.width; ++x) {
            if (x) out << ' ';
            out << (bmp.pixel(x, y) ? '1' : '0');
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Shape-spec text format:
//   grid W H
//   shape x1,y1 x2,y2 ...
// Blank lines and lines starting with # are ignored.
// ---------------------------------------------------------------------------

inline StoredImage read_shape_spec(std::istream& in, StorageMode mode) {
    StoredImage image;
    image.mode = mode;
    bool have_grid = false;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream ls(raw);
        std::string keyword;
        if (!(ls >> keyword) || keyword[0] == '#') continue;
        if (keyword == "grid") {
            if (have_grid) throw ParseError("duplicate grid line", line);
            if (!(ls >> image.grid.width >> image.grid.height)) {
                throw ParseError("expected `grid W H`", line);
            }
            have_grid = true;
        } else if (keyword == "shape") {
            if (!have_grid) throw ParseError("shape before grid line", line);
            Shape shape;
            std::string pair;
            while (ls >> pair) {
                const std::size_t comma = pair.find(',');
                if (comma == std::string::npos) {
                    throw ParseError("expected vertex `x,y`, got \"" + pair + "\"", line);
                }
                shape.vertices.emplace_back(
                    detail::parse_int(pair.substr(0, comma), "x coordinate", line),
                    detail::parse_int(pair.substr(comma + 1), "y coordinate", line));
            }
            if (shape.vertices.size() < 2) {
                throw ParseError("shape needs at least 2 vertices", line);
            }
            image.shapes.push_back(std::move(shape));
        } else {
            throw ParseError("unknown keyword \"" + keyword + "\"", line);
        }
    }
    if (!have_grid) throw ParseError("missing grid line", line);
    image.validate();
    return image;
}

inline void write_shape_spec(const StoredImage& image, std::ostream& out) {
    out << "grid " << image.grid.width << ' ' << image.grid.height << '\n';
    for (const auto& shape : image.shapes) {
        out << "shape";
        for (const auto& [x, y] : shape.vertices) out << ' ' << x << ',' << y;
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Memory state dump: the quantum-state debug format with a header line
//   grid W H mode M shapes K
// followed, when K > 0, by a `counts N1 N2 ...` line carrying the a-priori
// per-shape vertex counts.
// ---------------------------------------------------------------------------

inline void write_memory_dump(const MemoryState& m, std::ostream& out) {
    out << "grid " << m.grid.width << ' ' << m.grid.height << " mode " << to_string(m.mode)
        << " shapes " << m.header.shape_count() << '\n';
    if (m.header.shape_count() > 0) {
        out << "counts";
        for (int c : m.header.vertex_counts) out << ' ' << c;
        out << '\n';
    }
    write_state_text(m.state, out);
}

inline MemoryState read_memory_dump(std::istream& in) {
    std::string raw;
    if (!std::getline(in, raw)) throw ParseError("empty dump", 1);
    std::istringstream header(raw);
    std::string kw_grid, kw_mode, kw_shapes, mode_name;
    Grid grid;
    int shape_count = 0;
    if (!(header >> kw_grid >> grid.width >> grid.height >> kw_mode >> mode_name >> kw_shapes >>
          shape_count) ||
        kw_grid != "grid" || kw_mode != "mode" || kw_shapes != "shapes") {
        throw ParseError("expected `grid W H mode M shapes K` header", 1);
    }
    grid.validate();
    StorageMode mode;
    if (mode_name == "classical") {
        mode = StorageMode::classical;
    } else if (mode_name == "entangled") {
        mode = StorageMode::entangled;
    } else {
        throw ParseError("unknown mode \"" + mode_name + "\"", 1);
    }

    ImageHeader image_header;
    int line = 1;
    SparseState::AmplitudeMap amps;
    while (std::getline(in, raw)) {
        ++line;
        if (raw.empty()) continue;
        std::istringstream ls(raw);
        std::string first;
        ls >> first;
        if (first == "counts") {
            int c;
            while (ls >> c) image_header.vertex_counts.push_back(c);
            continue;
        }
        double re, im;
        if (!(ls >> re >> im)) throw ParseError("expected `label re im`", line);
        Label label;
        try {
            label = SparseState::parse_label(first);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line);
        }
        if (static_cast<int>(first.size()) != grid.n_qubits()) {
            throw ParseError("label width does not match grid", line);
        }
        if (!amps.emplace(label, Amplitude{re, im}).second) {
            throw ParseError("duplicate basis label", line);
        }
    }
    if (image_header.shape_count() != shape_count) {
        if (!(shape_count > 0 && image_header.vertex_counts.empty())) {
            throw ParseError("counts line does not match shape count", line);
        }
        // Dump produced without the optional counts line: header is unknown.
    }
    SparseState state = SparseState::from_amplitudes(grid.n_qubits(), std::move(amps));
    return MemoryState{std::move(state), grid, mode, std::move(image_header)};
}

// ---------------------------------------------------------------------------
// File helpers.
// ---------------------------------------------------------------------------

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    return out;
}

} // namespace qimem
