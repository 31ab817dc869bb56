// Command-line front end.
//
//   wefc compile <file>            emit the linear system for a source file
//   wefc decide  <file> --x BITS   solve one decision instance exactly
//   wefc verify  <file>            exhaustively certify the 0/1 property
//   wefc lab matching              matching-polytope checks
//   wefc lab sandwich              pair-matrix and factorization checks
//
// Source files hold either gate lists ("INPUTS ..." header) or pseudocode
// programs; the first meaningful token decides which frontend runs.
//
// Exit codes: 0 success, 1 a checked property failed, 2 bad usage or input.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wefc/circuit.hpp"
#include "wefc/compiler.hpp"
#include "wefc/driver.hpp"
#include "wefc/lp_io.hpp"
#include "wefc/matching.hpp"
#include "wefc/pseudolang.hpp"
#include "wefc/sandwich.hpp"

namespace {

using namespace wefc;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A file whose first meaningful line starts with INPUTS is a gate list.
bool looks_like_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        return tok == "INPUTS";
    }
    return false;
}

Rat parse_d(const std::string& s) {
    Rat d = rat_parse(s);
    if (!(d > 0) || d > Rat(1, 2))
        throw Error("d must lie in (0, 1/2], got " + s);
    return d;
}

std::vector<std::uint8_t> parse_bits(const std::string& s) {
    std::vector<std::uint8_t> x;
    for (char c : s) {
        if (c != '0' && c != '1')
            throw Error("input word must be a 0/1 string, got '" + s + "'");
        x.push_back(c == '1');
    }
    return x;
}

// Everything the subcommands need from one source file.
struct Loaded {
    bool is_circuit = false;
    Circuit circ;
    BasicProgram prog;
    int steps = 0;  // budget the program was compiled for
    WEFSystem sys;
    std::vector<std::string> input_names;
};

Loaded load_source(const std::string& path, int steps, int word_size) {
    Loaded out;
    std::string text = read_file(path);
    if (looks_like_circuit(text)) {
        out.is_circuit = true;
        out.circ = parse_circuit(text);
        out.sys = encode(out.circ);
        out.input_names = out.circ.inputs;
        return out;
    }
    out.prog = parse_program(text, word_size);
    out.steps = steps > 0 ? steps : out.prog.l();
    out.sys = compile(out.prog, out.steps);
    for (int slot : out.prog.table.input_slots)
        out.input_names.push_back(out.prog.table.slot_name[slot]);
    return out;
}

void print_table(std::ostream& os, const Loaded& in) {
    const WEFSystem& s = in.sys;
    os << "source: " << (in.is_circuit ? "gate list" : "program") << "\n";
    if (!in.is_circuit)
        os << "lines: " << in.prog.l() << "\nsteps: " << in.steps << "\n";
    os << "variables: " << s.stats.num_vars << "\n";
    os << "constraints: " << s.stats.num_constraints << "\n";
    os << "inputs:";
    for (const auto& nm : in.input_names) os << ' ' << nm;
    os << "\noutput: " << s.lp.names[s.w_var] << "\n";
    os << "rows by group:\n";
    for (const auto& [tag, cnt] : s.stats.per_group)
        os << "  " << tag << ": " << cnt << "\n";
    if (!in.is_circuit) {
        SizeBound b =
            size_bound(s, in.steps, in.prog.table.q, in.prog.table.W);
        os << "size bound: rows " << b.rows << " <= " << b.row_bound
           << ", vars " << b.vars << " <= " << b.var_bound << " ("
           << (b.ok() ? "ok" : "EXCEEDED") << ")\n";
    }
}

void emit_system(std::ostream& os, const Loaded& in, const std::string& fmt) {
    if (fmt == "table") {
        print_table(os, in);
    } else if (fmt == "lp") {
        write_lp_text(os, in.sys.lp, Objective{});
    } else if (fmt == "json" || fmt == "dump") {
        nlohmann::json j;
        j["system"] = system_to_json(in.sys.lp);
        j["x_vars"] = in.sys.x_vars;
        j["w_var"] = in.sys.w_var;
        os << j.dump(2) << "\n";
    } else {
        throw Error("unknown format '" + fmt + "'");
    }
}

// Shared by decide/verify so property failures map to exit code 1 while
// anything wrong with the invocation itself stays exit code 2.
struct PropertyFailure {
    std::string what;
};

int run_decide(const Loaded& in, const std::string& xs, const Rat& d) {
    std::vector<std::uint8_t> x = parse_bits(xs);
    if (x.size() != in.input_names.size())
        throw Error("expected " + std::to_string(in.input_names.size()) +
                    " input bits, got " + std::to_string(x.size()));
    Verdict v;
    try {
        v = decide(in.sys, x, d);
    } catch (const Error& e) {
        throw PropertyFailure{e.what()};
    }
    std::cout << "word: " << xs << "\n";
    std::cout << "m: " << v.m << "\n";
    std::cout << "d: " << rat_str(v.d) << "\n";
    std::cout << "z: " << rat_str(v.z) << "\n";
    std::cout << "verdict: " << (v.yes ? "yes" : "no") << "\n";
    return 0;
}

int run_verify(const Loaded& in, int jobs) {
    int n = static_cast<int>(in.input_names.size());
    if (n > 20)
        throw Error("exhaustive check over " + std::to_string(n) +
                    " inputs is out of reach");
    X01Report rep;
    if (in.is_circuit) {
        rep = verify_x01(
            in.sys,
            [&](const std::vector<std::uint8_t>& bits) {
                return eval(in.circ, bits).w;
            },
            64, jobs);
    } else {
        rep = verify_x01(
            in.sys,
            [&](const std::vector<std::uint8_t>& bits) {
                return interpret(in.prog, bits, in.steps).w;
            },
            64, jobs);
    }
    std::cout << "assignments: " << rep.checked << "\n";
    if (rep.ok) {
        std::cout << "result: every assignment extends to exactly one "
                     "integral point, output matches the oracle\n";
        return 0;
    }
    std::cout << "result: FAILED (" << rep.failures.size() << " assignments)\n";
    std::size_t show = std::min<std::size_t>(rep.failures.size(), 5);
    for (std::size_t i = 0; i < show; ++i) {
        const auto& f = rep.failures[i];
        std::cout << "  x=";
        for (auto b : f.x) std::cout << int(b);
        std::cout << ": " << f.reason << "\n";
    }
    if (show < rep.failures.size())
        std::cout << "  ... " << (rep.failures.size() - show) << " more\n";
    return 1;
}

int run_lab_matching(int n, const Rat& d, int count, std::uint32_t seed,
                     const std::string& which) {
    if (n < 2 || n > 6 || n % 2)
        throw Error("vertex count must be 2, 4, or 6");
    bool all = which == "all";
    if (!all && which != "face" && which != "oddset" && which != "law" &&
        which != "facets")
        throw Error("--check takes all, face, oddset, law, or facets");
    bool ok = true;
    auto line = [&](const std::string& what, bool good) {
        std::cout << (good ? "ok   " : "FAIL ") << what << "\n";
        ok = ok && good;
    };

    if (all || which == "face") {
        EpFaceReport face = check_ep_face(n);
        line("face rows valid on every matching vertex",
             face.valid_everywhere);
        line("tight vertices are exactly the " +
                 std::to_string(face.tight_count) + " perfect matchings",
             face.tight_exactly_matchings &&
                 face.tight_count == double_factorial_odd(n));
    }

    if (all || which == "oddset") {
        OddSetReport odd = check_odd_set(n);
        line("matching vectors satisfy all " +
                 std::to_string(odd.odd_set_rows) + " odd-set rows",
             odd.matchings_satisfy_all);
        line("0/1 solutions of the row system are exactly the matchings",
             odd.zero_one_solutions_are_matchings);
    }

    if (all || which == "law") {
        std::mt19937 rng(seed);
        int good_trials = 0;
        int E = GraphVec::num_edges(n);
        for (int t = 0; t < count; ++t) {
            GraphVec g(n, 0);
            for (int e = 0; e < E; ++e) g.x[e] = rng() & 1;
            if (check_prop2(g, d).matches_expectation) ++good_trials;
        }
        line("unique-optimum law on " + std::to_string(count) +
                 " random graphs (d = " + rat_str(d) + ")",
             good_trials == count);
    }

    // The facet-intersection construction needs hypomatchable sets of three
    // or more vertices, so it only says something from n = 4 up.
    if ((all && n >= 4) || which == "facets") {
        if (n < 4) throw Error("facet checks need n >= 4");
        AppendixReport app = check_appendix_facets(n);
        line("lower and upper facet rows valid on all matchings",
             app.lower_rows_valid && app.upper_rows_valid);
        line("facet-intersection matrix (dim " +
                 std::to_string(app.matrix_dim) + ") nonsingular",
             app.matrix_block_structure && app.matrix_nonsingular);
    }

    return ok ? 0 : 1;
}

// "11,01" style: each token is one member word, leftmost character first.
std::uint64_t words_to_mask(int n, const std::string& text) {
    std::uint64_t mask = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (static_cast<int>(tok.size()) != n)
            throw Error("member word '" + tok + "' is not " +
                        std::to_string(n) + " characters");
        std::uint64_t a = 0;
        for (int i = 0; i < n; ++i) {
            if (tok[i] != '0' && tok[i] != '1')
                throw Error("member word '" + tok + "' is not a 0/1 string");
            a |= std::uint64_t(tok[i] == '1') << i;
        }
        mask |= std::uint64_t(1) << a;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return mask;
}

int run_lab_sandwich(int n, const std::string& members,
                     const std::string& lang, const Rat& d,
                     std::uint32_t seed, bool csv) {
    if (n < 1 || n > 8) throw Error("word length must lie in [1, 8]");
    if (!members.empty() && !lang.empty())
        throw Error("give --members or --lang, not both");
    Language L;
    if (!lang.empty()) {
        if (n > 6) throw Error("an explicit member list needs n <= 6");
        L = Language::from_mask(n, words_to_mask(n, lang));
    } else if (!members.empty()) {
        if (n > 6) throw Error("an explicit member mask needs n <= 6");
        std::uint64_t mask = std::stoull(members, nullptr, 0);
        if (n < 6 && mask >> (1u << n))
            throw Error("member mask has bits past word " +
                        std::to_string((1 << n) - 1));
        L = Language::from_mask(n, mask);
    } else {
        L = random_language(n, seed);
    }

    std::ostream& rep = csv ? std::cerr : std::cout;
    rep << "words: " << L.words() << ", members:";
    for (long a = 0; a < L.words(); ++a)
        if (L.contains(a)) rep << ' ' << a;
    rep << "\n";

    bool ok = true;
    auto line = [&](const std::string& what, bool good) {
        rep << (good ? "ok   " : "FAIL ") << what << "\n";
        ok = ok && good;
    };

    Mat M = pair_matrix(L, d);
    WEFSystem H = membership_rows(L, d);
    Mat S = slack_matrix(H.lp, hull_vertices(L));
    line("slack of the membership rows on the hull vertices equals the "
         "pair matrix",
         S == M);

    Factorization F = identity_factorization(S);
    FactorizationReport fr = verify_factorization(F.T, F.U, S);
    line("identity factorization verifies (rank " + std::to_string(fr.rank) +
             ", entries up to " + std::to_string(fr.max_bits) + " bits)",
         fr.ok);

    WEFSystem Q = factor_system(L, d, F);
    line("extension built from the factorization has one row per word",
         Q.stats.num_constraints == L.words());

    if (csv) std::cout << matrix_csv(M);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear extension toolkit"};
    app.require_subcommand(1);

    std::string path, xs, fmt = "table", out_path, d_str = "1/2", members,
                lang, which = "all";
    int steps = 0, word_size = 0, jobs = 1, lab_n = 0, count = 20;
    std::uint32_t seed = 1;
    bool csv = false;

    CLI::App* c_compile =
        app.add_subcommand("compile", "translate a source file");
    c_compile->add_option("file", path, "circuit or program file")->required();
    c_compile->add_option("--steps", steps, "step budget (programs)");
    c_compile->add_option("--word-size", word_size,
                          "word size when no integer declaration sets one");
    c_compile->add_option("--format", fmt, "table, lp, or json (alias dump)");
    c_compile->add_option("-o,--output", out_path, "write here, not stdout");

    CLI::App* c_decide =
        app.add_subcommand("decide", "solve one decision instance");
    c_decide->add_option("file", path, "circuit or program file")->required();
    c_decide->add_option("--x", xs, "0/1 input word")->required();
    c_decide->add_option("--d", d_str, "tie-break weight, a rational (0,1/2]");
    c_decide->add_option("--steps", steps, "step budget (programs)");
    c_decide->add_option("--word-size", word_size, "fallback word size");

    CLI::App* c_verify =
        app.add_subcommand("verify", "certify the 0/1 extension property");
    c_verify->add_option("file", path, "circuit or program file")->required();
    c_verify->add_option("--steps", steps, "step budget (programs)");
    c_verify->add_option("--word-size", word_size, "fallback word size");
    c_verify->add_option("--jobs", jobs, "worker threads");

    CLI::App* c_lab = app.add_subcommand("lab", "self-contained study runs");
    c_lab->require_subcommand(1);
    CLI::App* c_match =
        c_lab->add_subcommand("matching", "matching-polytope checks");
    c_match->add_option("--n", lab_n, "vertex count (2, 4, or 6)");
    c_match->add_option("--d", d_str, "tie-break weight");
    c_match->add_option("--count", count, "random trials");
    c_match->add_option("--seed", seed, "random seed");
    c_match->add_option("--check", which,
                        "all, face, oddset, law, or facets");
    CLI::App* c_sand =
        c_lab->add_subcommand("sandwich", "pair-matrix checks");
    c_sand->add_option("--n", lab_n, "word length");
    c_sand->add_option("--lang", lang, "member words, e.g. 11 or 00,11");
    c_sand->add_option("--members", members, "member mask (decimal or 0x...)");
    c_sand->add_option("--d", d_str, "membership weight");
    c_sand->add_option("--seed", seed, "seed for a random language");
    c_sand->add_flag("--csv", csv, "print the pair matrix as CSV on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_compile) {
            Loaded in = load_source(path, steps, word_size);
            if (out_path.empty()) {
                emit_system(std::cout, in, fmt);
            } else {
                std::ofstream os(out_path, std::ios::binary);
                if (!os) throw Error("cannot write '" + out_path + "'");
                emit_system(os, in, fmt);
            }
            return 0;
        }
        if (*c_decide) {
            Loaded in = load_source(path, steps, word_size);
            return run_decide(in, xs, parse_d(d_str));
        }
        if (*c_verify) {
            Loaded in = load_source(path, steps, word_size);
            return run_verify(in, jobs);
        }
        if (*c_match) {
            if (lab_n == 0) lab_n = 4;
            return run_lab_matching(lab_n, parse_d(d_str), count, seed,
                                    which);
        }
        if (*c_sand) {
            if (lab_n == 0) lab_n = 2;
            Rat d = c_sand->count("--d") ? parse_d(d_str) : Rat(1, 3);
            return run_lab_sandwich(lab_n, members, lang, d, seed, csv);
        }
    } catch (const PropertyFailure& f) {
        std::cerr << "wefc: " << f.what << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "wefc: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "wefc: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
