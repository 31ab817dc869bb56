#pragma once

// Decision-driving layer on top of compiled systems.
//
// For an assignment xbar with m ones, the decision objective is
//   sum_{xbar_j = 1} x_j  -  sum_{xbar_j = 0} x_j  +  d * w
// with 0 < d <= 1/2.  Over any x-0/1 system the x-part of the objective is
// at most m, with equality exactly on the unique extension of xbar, so the
// optimum is m + d when that extension has w = 1 and strictly smaller
// otherwise.

#include <cstdint>
#include <map>
#include <thread>
#include <vector>

#include "wefc/circuit.hpp"
#include "wefc/lp.hpp"
#include "wefc/matching.hpp"
#include "wefc/wef.hpp"

namespace wefc {

struct DecisionInstance {
    std::vector<std::uint8_t> x;
    Rat d = Rat(1, 2);
};

struct Verdict {
    bool yes = false;
    Rat z;  // optimum of the decision objective
    int m = 0;
    Rat d;
    std::vector<Rat> point;
};

inline Objective build_objective(const WEFSystem& w,
                                 const std::vector<std::uint8_t>& xbar,
                                 const Rat& d) {
    if (xbar.size() != w.x_vars.size())
        throw Error("assignment length mismatch: want " +
                    std::to_string(w.x_vars.size()));
    if (!(Rat(0) < d && d <= Rat(1, 2)))
        throw Error("d must lie in (0, 1/2]");
    Objective obj;
    for (std::size_t j = 0; j < xbar.size(); ++j) {
        if (xbar[j] > 1) throw Error("assignments are bits");
        obj.terms.push_back({w.x_vars[j], xbar[j] ? Rat(1) : Rat(-1)});
    }
    obj.terms.push_back({w.w_var, d});
    return obj;
}

// Shares one simplex across many assignments on the same system.
class Decider {
  public:
    explicit Decider(const WEFSystem& w) : w_(w), eng_(w.lp) {}

    Verdict decide(const std::vector<std::uint8_t>& xbar,
                   const Rat& d = Rat(1, 2)) {
        Objective obj = build_objective(w_, xbar, d);
        OptResult r = eng_.maximize(obj);
        if (r.status != SolveStatus::Optimal)
            throw Error("decision system is infeasible or unbounded");
        Verdict v;
        v.m = 0;
        for (std::uint8_t b : xbar) v.m += b;
        v.d = d;
        v.z = r.z;
        v.point = std::move(r.point);
        Rat cap = Rat(v.m) + d;
        if (r.z > cap)
            throw Error("optimum " + rat_str(r.z) + " exceeds m + d = " +
                        rat_str(cap) + "; the system is not x-0/1");
        if (r.z < Rat(v.m))
            throw Error("optimum " + rat_str(r.z) + " is below m = " +
                        std::to_string(v.m) + "; the system is not x-0/1");
        v.yes = (r.z == cap);
        return v;
    }

  private:
    const WEFSystem& w_;
    Simplex eng_;
};

inline Verdict decide(const WEFSystem& w, const std::vector<std::uint8_t>& xbar,
                      const Rat& d = Rat(1, 2)) {
    Decider dec(w);
    return dec.decide(xbar, d);
}

inline Verdict decide(const WEFSystem& w, const DecisionInstance& inst) {
    return decide(w, inst.x, inst.d);
}

// --------------------------------------------------------------------------
// x-0/1 verification: every 0/1 assignment to the x variables must extend to
// exactly one point, that point must be integral, and its w must match the
// oracle.  Propagation usually pins everything; exact per-variable ranges
// cover the rest.

struct X01Failure {
    std::vector<std::uint8_t> x;
    std::string reason;
};

struct X01Report {
    bool ok = true;
    long checked = 0;
    std::vector<int> w_of;  // w per assignment, indexed by the bit mask
    std::vector<X01Failure> failures;
};

namespace detail {

inline std::vector<std::uint8_t> mask_bits(long mask, int n) {
    std::vector<std::uint8_t> x(n);
    for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1;
    return x;
}

// Single-assignment check; returns an empty reason on success and writes the
// extension's w value through out_w.
inline std::string check_one_x01(const WEFSystem& w,
                                 const std::vector<std::uint8_t>& x, int sweeps,
                                 int* out_w) {
    std::vector<std::pair<VarId, Rat>> pins;
    for (std::size_t j = 0; j < x.size(); ++j)
        pins.push_back({w.x_vars[j], Rat(x[j])});
    LPSystem fixed = fix_vars(w.lp, pins);
    PropResult prop = propagate_bounds(fixed, sweeps);
    std::vector<Rat> point;
    if (!prop.infeasible && prop.all_fixed()) {
        point = prop.lo;
        if (!fixed.point_feasible(point)) return "no extension (propagated point infeasible)";
    } else if (prop.infeasible) {
        return "no extension (" + prop.reason + ")";
    } else {
        std::vector<VarId> all(fixed.num_vars());
        for (int v = 0; v < fixed.num_vars(); ++v) all[v] = v;
        std::vector<std::pair<Rat, Rat>> rg;
        try {
            rg = range_all(fixed, all);
        } catch (const Error& e) {
            return std::string("no extension (") + e.what() + ")";
        }
        for (int v = 0; v < fixed.num_vars(); ++v)
            if (rg[v].first != rg[v].second)
                return "multiple extensions (variable " + fixed.names[v] +
                       " ranges over [" + rat_str(rg[v].first) + ", " +
                       rat_str(rg[v].second) + "])";
        point.reserve(fixed.num_vars());
        for (int v = 0; v < fixed.num_vars(); ++v) point.push_back(rg[v].first);
    }
    for (int v = 0; v < fixed.num_vars(); ++v)
        if (!rat_is_01(point[v]))
            return "fractional extension at " + fixed.names[v] + " = " +
                   rat_str(point[v]);
    *out_w = rat_to_long(point[w.w_var]) ? 1 : 0;
    return "";
}

}  // namespace detail

// oracle(x) returns the expected w bit.  jobs > 1 fans assignments out over
// threads in strides; results are merged in mask order, so the report is
// deterministic either way.
template <class Oracle>
X01Report verify_x01(const WEFSystem& w, Oracle&& oracle, int sweeps = 64,
                     int jobs = 1) {
    int n = static_cast<int>(w.x_vars.size());
    if (n > 24) throw Error("refusing to enumerate 2^" + std::to_string(n) +
                            " assignments");
    long total = 1L << n;
    X01Report rep;
    rep.checked = total;
    rep.w_of.assign(total, -1);
    std::vector<std::string> reasons(total);
    auto run = [&](long begin, long stride) {
        for (long mask = begin; mask < total; mask += stride) {
            std::vector<std::uint8_t> x = detail::mask_bits(mask, n);
            int wv = -1;
            std::string r = detail::check_one_x01(w, x, sweeps, &wv);
            if (r.empty()) {
                int expect = oracle(x) ? 1 : 0;
                if (wv != expect)
                    r = "w = " + std::to_string(wv) + " but the oracle says " +
                        std::to_string(expect);
            }
            reasons[mask] = std::move(r);
            rep.w_of[mask] = wv;
        }
    };
    if (jobs <= 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> ts;
        for (int j = 0; j < jobs; ++j) ts.emplace_back(run, j, jobs);
        for (auto& t : ts) t.join();
    }
    for (long mask = 0; mask < total; ++mask)
        if (!reasons[mask].empty()) {
            rep.ok = false;
            rep.failures.push_back(
                {detail::mask_bits(mask, n), reasons[mask]});
        }
    return rep;
}

// --------------------------------------------------------------------------
// Safe objective weights.  At d = 1/2 every no-assignment should already
// optimize strictly below m + 1/2; shrinking d below the smallest such gap
// pushes every no-optimum down to exactly m, attained only at the integral
// extension.  The candidate d is re-verified and halved until both regimes
// hold exactly.

namespace detail {

// Exact optimality-region probe: over { decision objective = m } the maximum
// of w must be zero, which pins the optimal face to the single extension.
inline bool no_optimum_unique(const WEFSystem& w,
                              const std::vector<std::uint8_t>& xbar,
                              const Rat& d, const Rat& m) {
    LPSystem sliced = w.lp;
    Objective obj = build_objective(w, xbar, d);
    sliced.add_eq(obj.terms, m, "optimal-face");
    OptResult r = solve(sliced, Objective{{{w.w_var, Rat(1)}}});
    return r.status == SolveStatus::Optimal && r.z == Rat(0);
}

}  // namespace detail

inline Rat find_safe_d(const WEFSystem& w) {
    int n = static_cast<int>(w.x_vars.size());
    if (n > 16) throw Error("refusing to enumerate 2^" + std::to_string(n) +
                            " assignments");
    long total = 1L << n;
    Decider dec(w);
    std::vector<char> is_yes(total);
    Rat half(1, 2);
    bool any_gap = false;
    Rat eps;
    for (long mask = 0; mask < total; ++mask) {
        std::vector<std::uint8_t> x = detail::mask_bits(mask, n);
        Verdict v = dec.decide(x, half);
        is_yes[mask] = v.yes;
        if (!v.yes && v.z > Rat(v.m)) {
            Rat gap = Rat(v.m) + half - v.z;
            if (!any_gap || gap < eps) eps = gap;
            any_gap = true;
        }
    }
    Rat d = any_gap ? eps / 2 : half;
    for (int round = 0; round < 64; ++round) {
        bool ok = true;
        for (long mask = 0; mask < total && ok; ++mask) {
            std::vector<std::uint8_t> x = detail::mask_bits(mask, n);
            Verdict v = dec.decide(x, d);
            if (is_yes[mask]) {
                ok = (v.z == Rat(v.m) + d);
            } else {
                ok = (v.z == Rat(v.m)) &&
                     detail::no_optimum_unique(w, x, d, Rat(v.m));
            }
        }
        if (ok) return d;
        d /= 2;
    }
    throw Error("no safe d found after repeated halving");
}

// --------------------------------------------------------------------------
// Threshold search.  decide_ge(k) answers "is the optimum at least k".  The
// low end is probed once as a sanity anchor, then the interval halves; every
// verdict is cached and checked against monotonicity.

struct SearchResult {
    long best = 0;
    long calls = 0;
};

template <class F>
SearchResult optimize_binary_search(long lo, long hi, F&& decide_ge) {
    if (lo > hi) throw Error("empty search interval");
    SearchResult res;
    std::map<long, bool> seen;
    auto probe = [&](long k) {
        auto it = seen.find(k);
        if (it != seen.end()) return it->second;
        bool v = decide_ge(k);
        ++res.calls;
        seen[k] = v;
        for (const auto& [k2, v2] : seen) {
            // A yes strictly above a no breaks monotonicity.
            if (k2 > k && v2 && !v)
                throw Error("non-monotone verdicts at " + std::to_string(k) +
                            " and " + std::to_string(k2));
            if (k2 < k && !v2 && v)
                throw Error("non-monotone verdicts at " + std::to_string(k2) +
                            " and " + std::to_string(k));
        }
        return v;
    };
    if (!probe(lo))
        throw Error("threshold search has no feasible value at " +
                    std::to_string(lo));
    while (lo < hi) {
        long mid = lo + (hi - lo + 1) / 2;
        if (probe(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    res.best = lo;
    return res;
}

// --------------------------------------------------------------------------
// Weighted matchings on the 4-vertex complete graph as a circuit family.
// Inputs are the 18 weight bits (edges in vertex-lexicographic order, three
// bits each, least significant first); the circuit for threshold k accepts
// when some perfect matching's weight sum reaches k.

inline std::vector<std::string> k4_weight_bit_names() {
    static const char* edges[] = {"12", "13", "14", "23", "24", "34"};
    std::vector<std::string> names;
    for (const char* e : edges)
        for (int j = 1; j <= 3; ++j)
            names.push_back("v" + std::string(e) + "b" + std::to_string(j));
    return names;
}

namespace detail {

// sum >= k for a bit vector (least significant first) against a constant
// 0 < k < 2^W, folded most-significant-bit-first: accept on the first
// position where the sum beats k, or on full equality.
inline CLit cmp_ge_const(CircuitBuilder& b, const std::vector<CLit>& s, long k,
                         const std::string& stem) {
    std::vector<CLit> wins;
    bool have_eq = false;
    CLit eq{};
    int cmp_id = 0;
    for (int j = static_cast<int>(s.size()); j >= 1; --j) {
        bool kb = (k >> (j - 1)) & 1;
        std::string cj = stem + "_q" + std::to_string(cmp_id++);
        if (!kb)
            wins.push_back(have_eq ? b.g_and(eq, s[j - 1], cj + "w")
                                   : s[j - 1]);
        CLit match = kb ? s[j - 1] : CircuitBuilder::neg(s[j - 1]);
        eq = have_eq ? b.g_and(eq, match, cj + "e") : match;
        have_eq = true;
    }
    wins.push_back(eq);
    return b.g_or_chain(wins, stem + "_ge");
}

}  // namespace detail

inline Circuit k4_threshold_circuit(long k) {
    CircuitBuilder b(k4_weight_bit_names());
    if (k <= 0) {
        b.g_or(b.in(0), CircuitBuilder::neg(b.in(0)), "w");
        return b.take("w");
    }
    if (k > 14) throw Error("two 3-bit weights never sum past 14");
    std::vector<CLit> accepts;
    int pm_id = 0;
    for (const auto& pm : all_perfect_matchings(4)) {
        std::string s0 = "pm" + std::to_string(pm_id++);
        internal_check(pm.size() == 2, "a 4-vertex matching has two edges");
        int e = pm[0], f = pm[1];
        auto a = [&](int j) { return b.in(e * 3 + j - 1); };
        auto bb = [&](int j) { return b.in(f * 3 + j - 1); };
        // Ripple sum of two 3-bit weights into s[1..4].
        CLit s1 = b.g_xor(a(1), bb(1), s0 + "_s1");
        CLit carry = b.g_and(a(1), bb(1), s0 + "_c1");
        std::vector<CLit> s{s1};
        for (int j = 2; j <= 3; ++j) {
            std::string sj = s0 + "_j" + std::to_string(j);
            CLit x = b.g_xor(a(j), bb(j), sj + "x");
            s.push_back(b.g_xor(x, carry, sj + "s"));
            CLit t1 = b.g_and(a(j), bb(j), sj + "t1");
            CLit t3 = b.g_and(x, carry, sj + "t3");
            carry = b.g_or(t1, t3, sj + "c");
        }
        s.push_back(carry);  // bit 4
        accepts.push_back(detail::cmp_ge_const(b, s, k, s0));
    }
    b.g_or_chain(accepts, "w");
    return b.take("w");
}

inline std::vector<std::uint8_t> k4_weight_bits(const std::vector<long>& wt) {
    if (wt.size() != 6) throw Error("six edge weights expected");
    std::vector<std::uint8_t> x;
    for (long v : wt) {
        if (v < 0 || v > 7) throw Error("edge weights lie in [0, 7]");
        for (int j = 0; j < 3; ++j) x.push_back((v >> j) & 1);
    }
    return x;
}

inline long k4_best_matching_weight(const std::vector<long>& wt) {
    long best = 0;
    for (const auto& pm : all_perfect_matchings(4)) {
        long s = 0;
        for (int e : pm) s += wt[e];
        if (s > best) best = s;
    }
    return best;
}

// End-to-end threshold optimization through compiled circuits.
inline SearchResult k4_optimize(const std::vector<long>& wt) {
    std::vector<std::uint8_t> x = k4_weight_bits(wt);
    return optimize_binary_search(0, 14, [&](long k) {
        WEFSystem sys = encode(k4_threshold_circuit(k));
        return decide(sys, x).yes;
    });
}

// Two-vertex variant: the single edge is the only matching, so the optimum
// is the edge weight itself.  Kept as the smallest end-to-end instance.
inline Circuit k2_threshold_circuit(long k) {
    CircuitBuilder b({"v12b1", "v12b2", "v12b3"});
    if (k <= 0) {
        b.g_or(b.in(0), CircuitBuilder::neg(b.in(0)), "w");
        return b.take("w");
    }
    if (k > 7) throw Error("a 3-bit weight never reaches past 7");
    detail::cmp_ge_const(b, {b.in(0), b.in(1), b.in(2)}, k, "e12");
    return b.take("w");
}

inline SearchResult k2_optimize(long weight) {
    if (weight < 0 || weight > 7) throw Error("edge weights lie in [0, 7]");
    std::vector<std::uint8_t> x;
    for (int j = 0; j < 3; ++j) x.push_back((weight >> j) & 1);
    return optimize_binary_search(0, 7, [&](long k) {
        WEFSystem sys = encode(k2_threshold_circuit(k));
        return decide(sys, x).yes;
    });
}

}  // namespace wefc
