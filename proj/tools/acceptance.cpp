// Acceptance gate: eleven end-to-end checks over the whole toolchain, one
// verdict line each.  Every numeric comparison is exact rational equality;
// the per-check wall-clock limits are pinned here and count as failures
// when exceeded.  Exits 0 only if every check passes.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wefc/circuit.hpp"
#include "wefc/compiler.hpp"
#include "wefc/driver.hpp"
#include "wefc/matching.hpp"
#include "wefc/pseudolang.hpp"
#include "wefc/sandwich.hpp"

using namespace wefc;

namespace {

const char* kMatching4 = R"(# four-vertex matching decision
input x12 x13 x14 x23 x24 x34
bit y12 y13 y14 w

y12 = x12 & x34
y13 = 0
y14 = 0
if y12 then go to 50 endif
y13 = x13 & x24
if y13 then go to 50 endif
y14 = x14 & x23
if y14 then go to 50 endif
w = 0
return
50: w = 1
return
)";

const char* kAllTemplates = R"(input s
input x[2]
int i width 2
int j width 2
array R[3]
array2 T[1][2]
bit a b c w

a = 1
b = 0
c = s
a = !c
b = s ^ c
c = s & a
a = s | b
w = x[0] | x[1] | c
inc i
inc j
b = i == j
R[i] = s
c = R[i]
T[i][j] = b
a = T[i][j]
if a then go to 90 endif
go to 91
90: w = c
91: return
)";

std::vector<std::uint8_t> bits_of(std::uint64_t mask, int n) {
    std::vector<std::uint8_t> v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1;
    return v;
}

// Collects a failure explanation; empty means the check passed.
using Why = std::ostringstream;

bool check_gate_tables(Why& why) {
    for (bool use_and : {true, false}) {
        CircuitBuilder b({"a", "b"});
        if (use_and)
            b.g_and(b.in(0), b.in(1), "w");
        else
            b.g_or(b.in(0), b.in(1), "w");
        Circuit c = b.take("w");
        WEFSystem sys = encode(c);
        X01Report rep = verify_x01(
            sys, [&](const std::vector<std::uint8_t>& x) { return eval(c, x).w; });
        if (!rep.ok || rep.checked != 4) {
            why << (use_and ? "AND" : "OR") << " table failed";
            return false;
        }
    }
    return true;
}

bool check_circuit_counts(Why& why) {
    WEFSystem a = encode(pm4_circuit());
    WEFSystem b = encode(pm4_circuit_paper());
    Circuit ca = pm4_circuit(), cb = pm4_circuit_paper();
    bool ok = a.stats.num_constraints == 4 * ca.t() &&
              a.stats.num_vars == ca.q() + ca.t() &&
              a.stats.num_constraints == 20 && a.stats.num_vars == 11 &&
              b.stats.num_constraints == 4 * cb.t() &&
              b.stats.num_vars == cb.q() + cb.t() &&
              b.stats.num_constraints == 28 && b.stats.num_vars == 13;
    if (!ok)
        why << "got " << a.stats.num_constraints << "/" << a.stats.num_vars
            << " and " << b.stats.num_constraints << "/" << b.stats.num_vars;
    return ok;
}

bool check_pm4_x01(Why& why) {
    Circuit c = pm4_circuit();
    WEFSystem sys = encode(c);
    X01Report rep = verify_x01(
        sys, [&](const std::vector<std::uint8_t>& x) { return eval(c, x).w; });
    if (!rep.ok || rep.checked != 64) {
        why << rep.failures.size() << " assignments failed";
        return false;
    }
    for (std::uint64_t mask = 0; mask < 64; ++mask)
        if ((rep.w_of[mask] != 0) != has_pm(GraphVec(4, mask))) {
            why << "output disagrees with the matching oracle at mask "
                << mask;
            return false;
        }
    return true;
}

bool check_decide_all_graphs(Why& why) {
    WEFSystem sys = encode(pm4_circuit());
    Decider dec(sys);
    int yes = 0;
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
        Verdict v = dec.decide(bits_of(mask, 6));
        if (v.yes != has_pm(GraphVec(4, mask))) {
            why << "verdict wrong at mask " << mask;
            return false;
        }
        yes += v.yes;
    }
    if (yes != 37) {
        why << "expected 37 yes instances, got " << yes;
        return false;
    }
    why << "37 yes / 27 no";
    return true;
}

// A three-vertex hull with one fractional corner at (1/4, 1, 1/2): large d
// rewards the fractional corner, small d collapses onto the integral point.
WEFSystem fractional_corner_system() {
    WEFSystem q;
    LPSystem& lp = q.lp;
    VarId x = lp.add_var("x");
    VarId w = lp.add_var("w");
    VarId s = lp.add_var("s");
    VarId l1 = lp.add_var("l1");
    VarId l2 = lp.add_var("l2");
    VarId l3 = lp.add_var("l3");
    lp.add_eq({{x, Rat(1)}, {l2, Rat(-1)}, {l3, Rat(-1, 4)}}, Rat(0), "hull x");
    lp.add_eq({{w, Rat(1)}, {l2, Rat(-1)}, {l3, Rat(-1)}}, Rat(0), "hull w");
    lp.add_eq({{s, Rat(1)}, {l2, Rat(-1)}, {l3, Rat(-1, 2)}}, Rat(0), "hull s");
    lp.add_eq({{l1, Rat(1)}, {l2, Rat(1)}, {l3, Rat(1)}}, Rat(1), "hull mass");
    q.x_vars = {x};
    q.w_var = w;
    q.finalize_stats();
    return q;
}

bool check_regime_change(Why& why) {
    WEFSystem q = fractional_corner_system();
    Verdict big = decide(q, {0}, Rat(1, 2));
    if (big.yes || big.z != Rat(1, 4)) {
        why << "d=1/2 no-side optimum is " << rat_str(big.z);
        return false;
    }
    Verdict small = decide(q, {0}, Rat(1, 8));
    if (small.yes || small.z != Rat(0)) {
        why << "d=1/8 no-side optimum is " << rat_str(small.z);
        return false;
    }
    Verdict one = decide(q, {1}, Rat(1, 2));
    if (!one.yes || one.z != Rat(3, 2)) {
        why << "yes-side optimum is " << rat_str(one.z);
        return false;
    }
    Rat safe = find_safe_d(q);
    if (safe != Rat(1, 8)) {
        why << "safe d came out as " << rat_str(safe);
        return false;
    }
    why << "threshold at d = 1/4, certified d = 1/8";
    return true;
}

bool check_program_x01(Why& why) {
    BasicProgram bp = parse_program(kMatching4);
    WEFSystem sys = compile(bp, 13);
    X01Report rep = verify_x01(sys, [&](const std::vector<std::uint8_t>& x) {
        return interpret(bp, x, 13).w;
    });
    if (!rep.ok || rep.checked != 64) {
        why << rep.failures.size() << " assignments failed";
        return false;
    }
    Decider dec(sys);
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
        Verdict v = dec.decide(bits_of(mask, 6));
        if (v.yes != has_pm(GraphVec(4, mask))) {
            why << "verdict wrong at mask " << mask;
            return false;
        }
    }
    return true;
}

bool check_size(Why& why) {
    BasicProgram bp = parse_program(kMatching4);
    WEFSystem w13 = compile(bp, 13);
    long rows13 = w13.stats.num_constraints;
    if (rows13 > 4 * 3200) {
        why << rows13 << " rows exceeds four times the budget";
        return false;
    }
    SizeBound b = size_bound(w13, 13, bp.table.q, bp.table.W);
    if (!b.ok()) {
        why << "rows " << b.rows << " over bound " << b.row_bound;
        return false;
    }
    // Row counts are affine in the step budget: doubling p pins the constant
    // part, which equals (pinning rows) - (per-step control rows) = -10.
    long rows26 = compile(bp, 26).stats.num_constraints;
    if (rows26 != 6724 || 2 * rows13 - rows26 != -10) {
        why << "rows(13) = " << rows13 << ", rows(26) = " << rows26;
        return false;
    }
    why << rows13 << " rows at p = 13";
    return true;
}

bool check_vacuous_rows(Why& why) {
    BasicProgram bp = parse_program(kAllTemplates);
    int p = bp.l();
    WEFSystem w = compile(bp, p);
    VarId s_block = (p + 1) * bp.table.q;
    long checked = 0, control = 0;
    for (const auto& con : w.lp.cons) {
        if (con.label.empty()) {
            why << "unlabeled row";
            return false;
        }
        if (con.label[0] != 'F' && con.label[0] != 'G') {
            ++control;
            continue;
        }
        if (con.sense != Sense::LE) {
            why << "non-<= step row '" << con.label << "'";
            return false;
        }
        int anchors = 0;
        Rat pos(0);
        for (const auto& term : con.terms) {
            if (term.var >= s_block && term.coef > Rat(0)) {
                ++anchors;
                if (term.coef != Rat(1)) anchors = 99;
            } else if (term.coef > Rat(0)) {
                pos += term.coef;
            }
        }
        // One unit step indicator; with it idle the positive remainder must
        // fit under the right-hand side, so the row binds nothing.
        if (anchors != 1 || pos > con.rhs) {
            why << "row '" << con.label << "' is not vacuous at rest";
            return false;
        }
        ++checked;
    }
    if (checked <= 3000 ||
        checked + control != w.stats.num_constraints) {
        why << "only " << checked << " step rows seen";
        return false;
    }
    why << checked << " step rows vacuous when idle";
    return true;
}

bool check_matching_lab(Why& why) {
    const int want_tight[] = {0, 1, 3, 15};
    for (int n : {2, 4, 6}) {
        EpFaceReport face = check_ep_face(n);
        if (!face.valid_everywhere || !face.tight_exactly_matchings ||
            face.tight_count != want_tight[n / 2]) {
            why << "face check failed at n = " << n;
            return false;
        }
    }
    std::mt19937 rng(920);
    for (int t = 0; t < 20; ++t) {
        GraphVec g(4, 0);
        for (int e = 0; e < 6; ++e) g.x[e] = rng() & 1;
        if (!check_prop2(g, Rat(1, 2)).matches_expectation) {
            why << "unique-optimum law failed on trial " << t;
            return false;
        }
    }
    AppendixReport app = check_appendix_facets(4);
    if (!app.lower_rows_valid || !app.upper_rows_valid ||
        !app.matrix_block_structure || !app.matrix_nonsingular ||
        app.matrix_dim != 7) {
        why << "facet matrix check failed";
        return false;
    }
    why << "tight counts 1/3/15, facet matrix 7x7 nonsingular";
    return true;
}

bool check_slack_identity(Why& why) {
    long langs = 0;
    for (int n = 1; n <= 3; ++n) {
        std::uint64_t total = 1ull << (1u << n);
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            Language L = Language::from_mask(n, mask);
            WEFSystem H = membership_rows(L, Rat(1, 3));
            if (slack_matrix(H.lp, hull_vertices(L)) !=
                pair_matrix(L, Rat(1, 3))) {
                why << "mismatch at n = " << n << ", mask " << mask;
                return false;
            }
            ++langs;
        }
    }
    for (int n : {4, 5, 6})
        for (int t = 0; t < 5; ++t) {
            Language L = random_language(n, 500 + 10 * n + t);
            WEFSystem H = membership_rows(L, Rat(1, 3));
            if (slack_matrix(H.lp, hull_vertices(L)) !=
                pair_matrix(L, Rat(1, 3))) {
                why << "mismatch at n = " << n << ", trial " << t;
                return false;
            }
            ++langs;
        }
    // Membership answers agree across the hull itself, the row relaxation,
    // the compiled two-bit program, and the factorization extension.
    Language L = Language::from_mask(2, 1u << 3);
    Rat d(1, 3);
    WEFSystem V = vertex_hull(L);
    WEFSystem H = membership_rows(L, d);
    Mat S = slack_matrix(H.lp, hull_vertices(L));
    WEFSystem Q = factor_system(L, d, identity_factorization(S));
    BasicProgram bp =
        parse_program("input x1 x2\nbit w\n\nw = x1 & x2\nreturn\n");
    WEFSystem C = compile(bp, bp.l());
    const WEFSystem* systems[] = {&V, &H, &C, &Q};
    for (const WEFSystem* P : systems)
        for (long a = 0; a < L.words(); ++a) {
            Verdict v = decide(*P, bits_of(a, 2), d);
            int m = __builtin_popcountll(a);
            bool want = L.contains(a);
            if (v.yes != want || v.z != Rat(m) + (want ? d : Rat(0))) {
                why << "membership disagrees at word " << a;
                return false;
            }
        }
    why << langs << " languages, four systems agree on membership";
    return true;
}

bool check_binary_search(Why& why) {
    std::mt19937 rng(771);
    std::uniform_int_distribution<long> dist(0, 7);
    for (int t = 0; t < 20; ++t) {
        std::vector<long> wt(6);
        for (auto& v : wt) v = dist(rng);
        SearchResult r = k4_optimize(wt);
        if (r.best != k4_best_matching_weight(wt)) {
            why << "wrong optimum on trial " << t;
            return false;
        }
        if (r.calls > 5) {
            why << r.calls << " oracle calls on trial " << t;
            return false;
        }
    }
    why << "20 weight vectors, at most 5 oracle calls each";
    return true;
}

}  // namespace

int main() {
    struct Check {
        const char* name;
        double limit_s;
        std::function<bool(Why&)> fn;
    };
    const Check checks[] = {
        {"gate truth tables extend uniquely", 1.0, check_gate_tables},
        {"gate-list system sizes are 4t rows, q+t columns", 1.0,
         check_circuit_counts},
        {"matching detector is 0/1-extendable on all 64 graphs", 10.0,
         check_pm4_x01},
        {"decision optimum separates matchings at d = 1/2", 30.0,
         check_decide_all_graphs},
        {"tie-break weight shows a regime change on a fractional corner",
         10.0, check_regime_change},
        {"compiled matching program certifies and decides all graphs", 600.0,
         check_program_x01},
        {"compiled size within budget, row count affine in steps", 60.0,
         check_size},
        {"every step-guarded row is vacuous while its line idles", 60.0,
         check_vacuous_rows},
        {"matching-polytope face, law, and facet checks", 60.0,
         check_matching_lab},
        {"pair-matrix slack identity and membership agreement", 120.0,
         check_slack_identity},
        {"weight optimization stays within the call bound", 60.0,
         check_binary_search},
    };

    int failed = 0;
    int idx = 0;
    for (const auto& c : checks) {
        ++idx;
        Why why;
        bool ok = false;
        std::string threw;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ok = c.fn(why);
        } catch (const std::exception& e) {
            threw = e.what();
        }
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        bool in_time = secs <= c.limit_s;
        bool pass = ok && in_time;
        if (!pass) ++failed;
        std::printf("[%2d] %s  %s (%.2fs, limit %.0fs)", idx,
                    pass ? "PASS" : "FAIL", c.name, secs, c.limit_s);
        if (!threw.empty())
            std::printf("  error: %s", threw.c_str());
        else if (!why.str().empty())
            std::printf("  %s", why.str().c_str());
        if (ok && !in_time) std::printf("  over time limit");
        std::printf("\n");
    }
    if (failed) {
        std::printf("%d of 11 checks failed\n", failed);
        return 1;
    }
    std::printf("all 11 checks passed\n");
    return 0;
}
