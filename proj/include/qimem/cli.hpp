#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qimem/qimem.hpp"

namespace qimem::cli {

inline std::string fmt(double v) { return format_double(v, 12); }

enum class InputKind { pbm, shape_spec, memory_dump };

inline InputKind detect_input(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first[0] == '#') continue;
        if (first == "P1") return InputKind::pbm;
        if (first == "grid") {
            int w, h;
            std::string kw;
            if (ls >> w >> h >> kw && kw == "mode") return InputKind::memory_dump;
            return InputKind::shape_spec;
        }
        throw ParseError("unrecognized input format in " + path, 1);
    }
    throw ParseError(path + " is empty", 1);
}

struct GridFlag {
    std::optional<Grid> grid;
};

inline void add_grid_flag(CLI::App* cmd, GridFlag& flag) {
    cmd->add_option_function<std::string>(
        "--grid",
        [&flag](const std::string& text) {
            const std::size_t x = text.find('x');
            if (x == std::string::npos) {
                throw CLI::ValidationError("--grid expects WxH, e.g. 4x4");
            }
            Grid g;
            g.width = detail::parse_int(text.substr(0, x), "grid width", 0);
            g.height = detail::parse_int(text.substr(x + 1), "grid height", 0);
            flag.grid = g;
        },
        "Expected grid size WxH (validated against the input)");
}

inline void check_grid_flag(const GridFlag& flag, const Grid& actual) {
    if (flag.grid && !(*flag.grid == actual)) {
        throw DimensionError("input grid is " + std::to_string(actual.width) + "x" +
                             std::to_string(actual.height) + ", --grid asked for " +
                             std::to_string(flag.grid->width) + "x" +
                             std::to_string(flag.grid->height));
    }
}

/// Writes to --out when given, to stdout otherwise.
struct OutputTarget {
    std::string path;

    void write(const std::string& content) const {
        if (path.empty()) {
            std::cout << content;
        } else {
            std::ofstream out = open_output(path);
            out << content;
        }
    }
};

// ---------------------------------------------------------------------------
// store
// ---------------------------------------------------------------------------

struct StoreOptions {
    std::string input;
    std::string out;
    std::string mode = "entangled";
    GridFlag grid;
};

inline int run_store(const StoreOptions& opt) {
    const InputKind kind = detect_input(opt.input);
    MemoryState memory = [&] {
        if (kind == InputKind::pbm) {
            if (opt.mode == "entangled") {
                throw ParseError("PBM input carries no shape grouping; entangled storage "
                                 "needs a shape-spec input");
            }
            std::ifstream in = open_input(opt.input);
            const Bitmap bmp = read_pbm(in);
            const Grid grid{bmp.width, bmp.height};
            std::vector<int> cells;
            for (std::uint64_t c : bmp.black_cells()) cells.push_back(static_cast<int>(c));
            return store_classical_cells(grid, cells);
        }
        if (kind == InputKind::memory_dump) {
            throw ParseError("input is already a memory dump");
        }
        std::ifstream in = open_input(opt.input);
        const StorageMode mode =
            opt.mode == "classical" ? StorageMode::classical : StorageMode::entangled;
        const StoredImage image = read_shape_spec(in, mode);
        return mode == StorageMode::classical ? store_classical(image) : store_entangled(image);
    }();
    check_grid_flag(opt.grid, memory.grid);

    std::ostringstream dump;
    write_memory_dump(memory, dump);
    if (opt.out.empty()) {
        std::cout << dump.str();
    } else {
        open_output(opt.out) << dump.str();
        std::cout << "stored grid " << memory.grid.width << ' ' << memory.grid.height << " mode "
                  << to_string(memory.mode) << " shapes " << memory.header.shape_count()
                  << " amplitudes " << memory.state.size() << '\n'
                  << "wrote " << opt.out << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// retrieve
// ---------------------------------------------------------------------------

struct RetrieveOptions {
    std::string input;
    std::string out;
    std::string pbm_out;
    std::string mode = "entangled"; // for shape-spec inputs
    GridFlag grid;
    bool exact = false;
    long shots = 0;
    std::uint64_t seed = 0;
    double margin = 0.02;
    std::vector<int> probe;
    int restarts = 32;
    int workers = 1;
    bool no_skip = false;
};

inline MemoryState load_memory(const std::string& path, const std::string& mode) {
    const InputKind kind = detect_input(path);
    std::ifstream in = open_input(path);
    if (kind == InputKind::memory_dump) return read_memory_dump(in);
    if (kind == InputKind::shape_spec) {
        const StorageMode m = mode == "classical" ? StorageMode::classical : StorageMode::entangled;
        const StoredImage image = read_shape_spec(in, m);
        return m == StorageMode::classical ? store_classical(image) : store_entangled(image);
    }
    throw ParseError("retrieve expects a memory dump or shape-spec input");
}

inline std::string render_retrieval_report(const RetrievalReport& report,
                                           const RetrievalConfig& config) {
    std::ostringstream out;
    out << "qimem-report 1\n";
    out << "command retrieve\n";
    out << "grid " << report.grid.width << ' ' << report.grid.height << '\n';
    out << "mode " << (report.mode == RetrievalConfig::Mode::exact ? "exact" : "shots") << '\n';
    out << "seed " << config.seed << '\n';
    if (report.mode == RetrievalConfig::Mode::shots) {
        out << "shots " << config.shots_per_correlator << '\n';
    }
    out << "margin " << fmt(config.effective_margin()) << '\n';
    out << "restarts " << config.optimizer_restarts << '\n';
    out << "workers " << config.workers << '\n';
    out << "skip " << (config.skip_found ? 1 : 0) << '\n';
    out << "probe";
    for (int c : report.probed_counts) out << ' ' << c;
    out << '\n';
    out << "worst_case_bound " << report.worst_case_bound << '\n';
    out << "tests " << report.tests.size() << '\n';
    for (std::size_t i = 0; i < report.tests.size(); ++i) {
        const SubsetTest& t = report.tests[i];
        out << "test " << i << " subset";
        for (int q : t.qubits) out << ' ' << q;
        out << " value " << fmt(t.result.value) << " bound " << fmt(t.result.biseparable_bound)
            << " threshold " << fmt(t.result.threshold) << " violated "
            << (t.result.violated ? 1 : 0) << " preparations " << t.preparations << '\n';
    }
    out << "found " << report.found_shapes.size() << '\n';
    for (std::size_t i = 0; i < report.found_shapes.size(); ++i) {
        const auto& shape = report.found_shapes[i];
        out << "shape " << i << " count " << shape.size() << " qubits";
        for (int q : shape) out << ' ' << q;
        out << " coords";
        for (int q : shape) {
            out << ' ' << (q % report.grid.width) << ',' << (q / report.grid.width);
        }
        out << '\n';
    }
    out << "total_preparations " << report.total_preparations << '\n';
    return out.str();
}

inline Bitmap reconstruction_bitmap(const RetrievalReport& report) {
    Bitmap bmp;
    bmp.width = report.grid.width;
    bmp.height = report.grid.height;
    bmp.pixels.assign(
        static_cast<std::size_t>(bmp.width) * static_cast<std::size_t>(bmp.height), 0);
    for (const auto& shape : report.found_shapes) {
        for (int q : shape) bmp.pixels[static_cast<std::size_t>(q)] = 1;
    }
    return bmp;
}

inline int run_retrieve(const RetrieveOptions& opt) {
    const MemoryState memory = load_memory(opt.input, opt.mode);
    check_grid_flag(opt.grid, memory.grid);

    RetrievalConfig config;
    config.mode = (opt.shots > 0 && !opt.exact) ? RetrievalConfig::Mode::shots
                                                : RetrievalConfig::Mode::exact;
    if (opt.shots > 0) config.shots_per_correlator = opt.shots;
    config.vertex_counts = opt.probe;
    config.margin = opt.margin;
    config.optimizer_restarts = opt.restarts;
    config.skip_found = !opt.no_skip;
    config.workers = opt.workers;
    config.seed = opt.seed;

    const MemoryOracle oracle = [&memory] { return memory; };
    const RetrievalReport report = find_shapes(oracle, memory.grid, config);

    OutputTarget{opt.out}.write(render_retrieval_report(report, config));
    if (!opt.pbm_out.empty()) {
        std::ofstream out = open_output(opt.pbm_out);
        write_pbm(reconstruction_bitmap(report), out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// witness
// ---------------------------------------------------------------------------

struct WitnessOptions {
    std::string state;
    std::string input;
    std::string out;
    std::uint64_t seed = 0;
    double margin = 0.02;
    int restarts = 32;
};

inline DensityOperator witness_target(const WitnessOptions& opt, std::string& label) {
    if (!opt.input.empty()) {
        label = opt.input;
        std::ifstream in = open_input(opt.input);
        const MemoryState memory = read_memory_dump(in);
        if (memory.state.n_qubits() > 6) {
            throw SizeError("the witness covers whole states of at most 6 qubits; "
                            "use `retrieve` to test subsets of a larger memory");
        }
        return to_density(memory.state);
    }
    label = opt.state;
    if (opt.state == "singlet") return to_density(make_singlet());
    if (opt.state == "biseparable3") {
        return to_density(tensor(make_ghz(2), SparseState::zero(1)));
    }
    if (opt.state.rfind("ghz", 0) == 0) {
        const int n = detail::parse_int(opt.state.substr(3), "GHZ party count", 0);
        return to_density(make_ghz(n));
    }
    throw ParseError("unknown state \"" + opt.state +
                     "\"; expected ghz2..ghz6, singlet or biseparable3");
}

inline int run_witness(const WitnessOptions& opt) {
    if (opt.state.empty() == opt.input.empty()) {
        throw ParseError("witness needs exactly one of --state or --in");
    }
    std::string label;
    const DensityOperator rho = witness_target(opt, label);

    WitnessConfig config;
    config.restarts = opt.restarts;
    config.margin = opt.margin;
    Rng rng(opt.seed);
    const SvetlichnyResult result = max_svetlichny(rho, config, rng);

    std::ostringstream out;
    out << "qimem-report 1\n";
    out << "command witness\n";
    out << "state " << label << '\n';
    out << "n_parties " << rho.n_qubits() << '\n';
    out << "seed " << opt.seed << '\n';
    out << "restarts " << opt.restarts << '\n';
    out << "margin " << fmt(opt.margin) << '\n';
    out << "value " << fmt(result.value) << '\n';
    out << "biseparable_bound " << fmt(result.biseparable_bound) << '\n';
    out << "quantum_max " << fmt(result.quantum_max) << '\n';
    out << "threshold " << fmt(result.threshold) << '\n';
    out << "violated " << (result.violated ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < result.settings.size(); ++i) {
        out << "setting " << i << ' ' << fmt(result.settings[i].unprimed.phi) << ' '
            << fmt(result.settings[i].primed.phi) << '\n';
    }
    OutputTarget{opt.out}.write(out.str());
    return 0;
}

// ---------------------------------------------------------------------------
// grover
// ---------------------------------------------------------------------------

struct GroverOptions {
    std::string input;
    std::string out;
    std::uint64_t seed = 0;
    int max_repeats = 1000;
    GridFlag grid;
};

inline int run_grover(const GroverOptions& opt) {
    const InputKind kind = detect_input(opt.input);
    int width = 0, height = 0;
    std::uint64_t n_cells = 0;
    std::vector<std::uint64_t> marked;
    if (kind == InputKind::pbm) {
        std::ifstream in = open_input(opt.input);
        const Bitmap bmp = read_pbm(in);
        width = bmp.width;
        height = bmp.height;
        n_cells = static_cast<std::uint64_t>(bmp.width) * static_cast<std::uint64_t>(bmp.height);
        marked = bmp.black_cells();
    } else if (kind == InputKind::memory_dump) {
        std::ifstream in = open_input(opt.input);
        const MemoryState memory = read_memory_dump(in);
        if (memory.mode != StorageMode::classical) {
            throw OracleError("Grover retrieval requires a classical memory; "
                              "use `retrieve` for entangled storage");
        }
        width = memory.grid.width;
        height = memory.grid.height;
        n_cells = static_cast<std::uint64_t>(memory.grid.n_qubits());
        const Label label = memory.state.amplitudes().begin()->first;
        for (int q = 0; q < memory.state.n_qubits(); ++q) {
            if (memory.state.bit(label, q)) marked.push_back(static_cast<std::uint64_t>(q));
        }
    } else {
        throw ParseError("grover expects a PBM or classical memory dump input");
    }
    if (opt.grid.grid) check_grid_flag(opt.grid, Grid{width, height});

    Rng rng(opt.seed);
    const GroverRetrieval result = locate_marked_cells(n_cells, marked, rng, opt.max_repeats);

    std::ostringstream out;
    out << "qimem-report 1\n";
    out << "command grover\n";
    out << "grid " << width << ' ' << height << '\n';
    out << "cells " << n_cells << '\n';
    out << "address_space " << std::bit_ceil(n_cells) << '\n';
    out << "marked " << marked.size() << '\n';
    out << "seed " << opt.seed << '\n';
    out << "max_repeats " << opt.max_repeats << '\n';
    if (!marked.empty()) {
        const long t = grover_iterations(std::bit_ceil(n_cells), marked.size());
        out << "iterations " << t << '\n';
        out << "success_probability " << fmt(grover_success_probability(std::bit_ceil(n_cells),
                                                                        marked.size(), t))
            << '\n';
    }
    out << "runs " << result.runs.size() << '\n';
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        out << "run " << i << " sampled " << result.runs[i].sampled_address << " hit "
            << (result.runs[i].hit ? 1 : 0) << '\n';
    }
    out << "found " << result.found.size() << '\n';
    for (std::size_t i = 0; i < result.found.size(); ++i) {
        const std::uint64_t a = result.found[i];
        out << "vertex " << i << ' ' << a << ' ' << (a % static_cast<std::uint64_t>(width)) << ','
            << (a / static_cast<std::uint64_t>(width)) << '\n';
    }
    out << "oracle_queries " << result.oracle_queries << '\n';
    out << "complete " << (result.complete ? 1 : 0) << '\n';
    OutputTarget{opt.out}.write(out.str());
    return 0;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

struct InspectOptions {
    std::string input;
};

inline int run_inspect(const InspectOptions& opt) {
    const InputKind kind = detect_input(opt.input);
    std::ostringstream out;
    out << "file " << opt.input << '\n';
    if (kind == InputKind::pbm) {
        std::ifstream in = open_input(opt.input);
        const Bitmap bmp = read_pbm(in);
        out << "type pbm\n";
        out << "grid " << bmp.width << ' ' << bmp.height << '\n';
        out << "black_pixels " << bmp.black_cells().size() << '\n';
    } else if (kind == InputKind::shape_spec) {
        std::ifstream in = open_input(opt.input);
        const StoredImage image = read_shape_spec(in, StorageMode::entangled);
        out << "type shape-spec\n";
        out << "grid " << image.grid.width << ' ' << image.grid.height << '\n';
        out << "shapes " << image.shapes.size() << '\n';
        for (std::size_t i = 0; i < image.shapes.size(); ++i) {
            out << "shape " << i << " vertices " << image.shapes[i].vertices.size() << '\n';
        }
    } else {
        std::ifstream in = open_input(opt.input);
        const MemoryState memory = read_memory_dump(in);
        out << "type memory-dump\n";
        out << "grid " << memory.grid.width << ' ' << memory.grid.height << '\n';
        out << "mode " << to_string(memory.mode) << '\n';
        out << "shapes " << memory.header.shape_count() << '\n';
        if (memory.header.shape_count() > 0) {
            out << "counts";
            for (int c : memory.header.vertex_counts) out << ' ' << c;
            out << '\n';
        }
        out << "amplitudes " << memory.state.size() << '\n';
    }
    std::cout << out.str();
    return 0;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv) {
    CLI::App app{"qubit-array image memory simulator: GHZ-entangled storage, "
                 "witness-based retrieval and Grover vertex search"};
    app.require_subcommand(1);

    StoreOptions store_opt;
    auto* store = app.add_subcommand("store", "Encode an image into a memory-state dump");
    store->add_option("--in", store_opt.input, "Shape-spec or PBM input")->required();
    store->add_option("--out", store_opt.out, "Dump path (stdout when omitted)");
    store->add_option("--mode", store_opt.mode, "classical|entangled")
        ->check(CLI::IsMember({"classical", "entangled"}));
    add_grid_flag(store, store_opt.grid);

    RetrieveOptions retrieve_opt;
    auto* retrieve =
        app.add_subcommand("retrieve", "Recover stored shapes by entanglement witnessing");
    retrieve->add_option("--in", retrieve_opt.input, "Memory dump or shape-spec input")
        ->required();
    retrieve->add_option("--out", retrieve_opt.out, "Report path (stdout when omitted)");
    retrieve->add_option("--pbm", retrieve_opt.pbm_out, "Write the reconstructed image here");
    retrieve->add_option("--mode", retrieve_opt.mode, "Storage mode for shape-spec inputs")
        ->check(CLI::IsMember({"classical", "entangled"}));
    auto* exact_flag = retrieve->add_flag("--exact", retrieve_opt.exact,
                                          "Noise-free reduced-state tests (default)");
    retrieve->add_option("--shots", retrieve_opt.shots,
                         "Shot mode: samples per correlator, each consuming one "
                         "fresh preparation")
        ->excludes(exact_flag);
    retrieve->add_option("--seed", retrieve_opt.seed, "Random seed");
    retrieve->add_option("--margin", retrieve_opt.margin, "Relative violation margin");
    retrieve->add_option("--probe", retrieve_opt.probe,
                         "Shape inventory to probe, e.g. 3,3 (default: memory header)")
        ->delimiter(',');
    retrieve->add_option("--restarts", retrieve_opt.restarts, "Witness optimizer restarts");
    retrieve->add_option("--workers", retrieve_opt.workers, "Parallel subset-test workers");
    retrieve->add_flag("--no-skip", retrieve_opt.no_skip,
                       "Also test subsets that intersect already-found shapes");
    add_grid_flag(retrieve, retrieve_opt.grid);

    WitnessOptions witness_opt;
    auto* witness = app.add_subcommand("witness", "Optimize the Svetlichny witness on a state");
    witness->add_option("--state", witness_opt.state, "ghz2..ghz6, singlet or biseparable3");
    witness->add_option("--in", witness_opt.input, "Memory dump to test instead");
    witness->add_option("--out", witness_opt.out, "Report path (stdout when omitted)");
    witness->add_option("--seed", witness_opt.seed, "Random seed");
    witness->add_option("--margin", witness_opt.margin, "Relative violation margin");
    witness->add_option("--restarts", witness_opt.restarts, "Optimizer restarts");

    GroverOptions grover_opt;
    auto* grover = app.add_subcommand("grover", "Recover marked cells of a classical memory");
    grover->add_option("--in", grover_opt.input, "PBM or classical memory dump")->required();
    grover->add_option("--out", grover_opt.out, "Report path (stdout when omitted)");
    grover->add_option("--seed", grover_opt.seed, "Random seed");
    grover->add_option("--max-repeats", grover_opt.max_repeats, "Search run budget");
    add_grid_flag(grover, grover_opt.grid);

    InspectOptions inspect_opt;
    auto* inspect = app.add_subcommand("inspect", "Summarize an input or dump file");
    inspect->add_option("--in", inspect_opt.input, "File to inspect")->required();

    try {
        app.parse(argc, argv);
        if (store->parsed()) return run_store(store_opt);
        if (retrieve->parsed()) return run_retrieve(retrieve_opt);
        if (witness->parsed()) return run_witness(witness_opt);
        if (grover->parsed()) return run_grover(grover_opt);
        if (inspect->parsed()) return run_inspect(inspect_opt);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConsistencyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace qimem::cli
