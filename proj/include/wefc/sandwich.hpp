#pragma once

// Pairwise decision matrices and the polytope sandwich around them.
//
// Fix a set L of n-bit words and a weight 0 < d <= 1/2.  The pair matrix
//   M[a][b] = Hamming(a, b) + d * ([a in L] - [b in L])
// is the slack matrix of an outer halfspace system H (one row per word a)
// against the inner vertex hull V (one vertex per word b), so any polytope
// sandwiched between V and H answers membership queries through the same
// optimization that drives compiled systems: maximize phi(a)^T x + d w and
// compare against a^T 1 + d.
//
// A nonnegative factorization M = T U induces an equational extension
//   Q = { (x, w, y) : phi(a)^T x + d w + (T y)_a = b_a,  y >= 0 }
// that is itself sandwiched, with as many extra variables as the
// factorization has columns.

#include <bit>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wefc/lp.hpp"
#include "wefc/rat.hpp"
#include "wefc/wef.hpp"

namespace wefc {

// A subset of {0,1}^n; word a's bit i is (a >> i) & 1.
struct Language {
    int n = 0;
    std::vector<char> in;  // indexed by word, size 1 << n

    static Language from_mask(int n, std::uint64_t members) {
        if (n < 1 || n > 20) throw Error("word length out of range");
        Language L;
        L.n = n;
        L.in.assign(1u << n, 0);
        for (long a = 0; a < (1L << n); ++a)
            L.in[a] = (members >> a) & 1;
        return L;
    }

    long words() const { return 1L << n; }
    bool contains(long a) const { return in[a] != 0; }
};

using Mat = std::vector<std::vector<Rat>>;

inline int hamming(long a, long b) {
    return std::popcount(static_cast<unsigned long long>(a ^ b));
}

inline Rat pair_entry(const Language& L, long a, long b, const Rat& d) {
    Rat v(hamming(a, b));
    if (L.contains(a) && !L.contains(b)) v += d;
    if (!L.contains(a) && L.contains(b)) v -= d;
    return v;
}

inline Mat pair_matrix(const Language& L, const Rat& d = Rat(1, 3)) {
    if (!(Rat(0) < d && d <= Rat(1, 2)))
        throw Error("d must lie in (0, 1/2]");
    Mat m(L.words(), std::vector<Rat>(L.words()));
    for (long a = 0; a < L.words(); ++a)
        for (long b = 0; b < L.words(); ++b) m[a][b] = pair_entry(L, a, b, d);
    return m;
}

// Outer system H: one row per word a, signs follow a's bits.
inline WEFSystem membership_rows(const Language& L, const Rat& d = Rat(1, 3)) {
    if (!(Rat(0) < d && d <= Rat(1, 2)))
        throw Error("d must lie in (0, 1/2]");
    WEFSystem sys;
    LPSystem& lp = sys.lp;
    for (int i = 1; i <= L.n; ++i)
        sys.x_vars.push_back(lp.add_var("x" + std::to_string(i)));
    sys.w_var = lp.add_var("w");
    for (long a = 0; a < L.words(); ++a) {
        std::vector<Term> ts;
        int ones = 0;
        for (int i = 0; i < L.n; ++i) {
            bool on = (a >> i) & 1;
            ones += on;
            ts.push_back({sys.x_vars[i], on ? Rat(1) : Rat(-1)});
        }
        ts.push_back({sys.w_var, d});
        Rat rhs = Rat(ones) + (L.contains(a) ? d : Rat(0));
        lp.add_le(std::move(ts), rhs, "H a=" + std::to_string(a));
    }
    sys.finalize_stats();
    return sys;
}

// Inner hull V as a convex-combination extension over its 2^n vertices.
inline WEFSystem vertex_hull(const Language& L) {
    WEFSystem sys;
    LPSystem& lp = sys.lp;
    for (int i = 1; i <= L.n; ++i)
        sys.x_vars.push_back(lp.add_var("x" + std::to_string(i)));
    sys.w_var = lp.add_var("w");
    std::vector<VarId> lam;
    for (long b = 0; b < L.words(); ++b)
        lam.push_back(lp.add_var("l" + std::to_string(b)));
    for (int i = 0; i < L.n; ++i) {
        std::vector<Term> ts{{sys.x_vars[i], Rat(1)}};
        for (long b = 0; b < L.words(); ++b)
            if ((b >> i) & 1) ts.push_back({lam[b], Rat(-1)});
        lp.add_eq(std::move(ts), Rat(0), "V x" + std::to_string(i + 1));
    }
    {
        std::vector<Term> ts{{sys.w_var, Rat(1)}};
        for (long b = 0; b < L.words(); ++b)
            if (L.contains(b)) ts.push_back({lam[b], Rat(-1)});
        lp.add_eq(std::move(ts), Rat(0), "V w");
    }
    {
        std::vector<Term> ts;
        for (long b = 0; b < L.words(); ++b) ts.push_back({lam[b], Rat(1)});
        lp.add_eq(std::move(ts), Rat(1), "V mass");
    }
    sys.finalize_stats();
    return sys;
}

// The hull's vertices as explicit (x, w) points, in word order.
inline std::vector<std::vector<Rat>> hull_vertices(const Language& L) {
    std::vector<std::vector<Rat>> pts;
    for (long b = 0; b < L.words(); ++b) {
        std::vector<Rat> p;
        for (int i = 0; i < L.n; ++i) p.push_back(Rat((b >> i) & 1));
        p.push_back(Rat(L.contains(b) ? 1 : 0));
        pts.push_back(std::move(p));
    }
    return pts;
}

// Slack of each inequality row against each point: rhs minus activity.
inline Mat slack_matrix(const LPSystem& outer,
                        const std::vector<std::vector<Rat>>& points) {
    Mat s;
    for (const auto& con : outer.cons) {
        if (con.sense != Sense::LE)
            throw Error("slack is defined against <= rows");
        std::vector<Rat> row;
        for (const auto& p : points) {
            Rat act(0);
            for (const auto& t : con.terms) {
                if (t.var >= static_cast<VarId>(p.size()))
                    throw Error("point dimension below row support");
                act += t.coef * p[t.var];
            }
            row.push_back(con.rhs - act);
        }
        s.push_back(std::move(row));
    }
    return s;
}

// --------------------------------------------------------------------------
// Nonnegative factorizations.

struct Factorization {
    Mat T, U;
};

inline Factorization identity_factorization(const Mat& S) {
    Factorization f;
    f.T = S;
    long n = static_cast<long>(S.size());
    f.U.assign(n, std::vector<Rat>(n, Rat(0)));
    for (long i = 0; i < n; ++i) f.U[i][i] = Rat(1);
    return f;
}

struct FactorizationReport {
    bool ok = false;
    std::string reason;
    long rank = 0;      // inner dimension
    long max_bits = 0;  // largest numerator/denominator bit length seen
};

namespace detail {

inline long rat_bits(const Rat& r) {
    BigInt num = numerator(r) < 0 ? BigInt(-numerator(r)) : BigInt(numerator(r));
    BigInt den = denominator(r);
    long b = 1;
    if (num > 0)
        b = std::max<long>(b, boost::multiprecision::msb(num) + 1);
    b = std::max<long>(b, boost::multiprecision::msb(den) + 1);
    return b;
}

}  // namespace detail

inline FactorizationReport verify_factorization(const Mat& T, const Mat& U,
                                                const Mat& S) {
    FactorizationReport rep;
    auto fail = [&](const std::string& why) {
        rep.reason = why;
        return rep;
    };
    long rows = static_cast<long>(S.size());
    if (rows == 0) return fail("empty target");
    long cols = static_cast<long>(S[0].size());
    if (static_cast<long>(T.size()) != rows) return fail("row count mismatch");
    long rank = T.empty() ? 0 : static_cast<long>(T[0].size());
    if (static_cast<long>(U.size()) != rank)
        return fail("inner dimension mismatch");
    for (const auto& r : U)
        if (static_cast<long>(r.size()) != cols)
            return fail("column count mismatch");
    rep.rank = rank;
    for (const auto& m : {&T, &U})
        for (const auto& r : *m)
            for (const Rat& v : r) {
                if (v < Rat(0)) return fail("negative factor entry");
                rep.max_bits = std::max(rep.max_bits, detail::rat_bits(v));
            }
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            Rat acc(0);
            for (long k = 0; k < rank; ++k) acc += T[i][k] * U[k][j];
            if (acc != S[i][j])
                return fail("product differs from the target at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
        }
    rep.ok = true;
    return rep;
}

// Equational extension built from a factorization of the pair matrix: one
// equality per word, one nonnegative variable per factor column, boxed one
// past the largest factor value so no vertex is clipped.
inline WEFSystem factor_system(const Language& L, const Rat& d,
                               const Factorization& f) {
    FactorizationReport rep = verify_factorization(f.T, f.U, pair_matrix(L, d));
    if (!rep.ok) throw Error("factorization rejected: " + rep.reason);
    Rat ymax(1);
    for (const auto& r : f.U)
        for (const Rat& v : r) ymax = std::max(ymax, v);
    ymax += 1;
    WEFSystem sys;
    LPSystem& lp = sys.lp;
    for (int i = 1; i <= L.n; ++i)
        sys.x_vars.push_back(lp.add_var("x" + std::to_string(i)));
    sys.w_var = lp.add_var("w");
    std::vector<VarId> y;
    for (long k = 0; k < rep.rank; ++k)
        y.push_back(lp.add_var("y" + std::to_string(k), Rat(0), ymax));
    for (long a = 0; a < L.words(); ++a) {
        std::vector<Term> ts;
        int ones = 0;
        for (int i = 0; i < L.n; ++i) {
            bool on = (a >> i) & 1;
            ones += on;
            ts.push_back({sys.x_vars[i], on ? Rat(1) : Rat(-1)});
        }
        ts.push_back({sys.w_var, d});
        for (long k = 0; k < rep.rank; ++k)
            if (f.T[a][k] != Rat(0)) ts.push_back({y[k], f.T[a][k]});
        Rat rhs = Rat(ones) + (L.contains(a) ? d : Rat(0));
        lp.add_eq(std::move(ts), rhs, "Q a=" + std::to_string(a));
    }
    sys.finalize_stats();
    return sys;
}

// Random language with each word kept independently; fixed-seed reproducible.
inline Language random_language(int n, std::uint32_t seed) {
    Language L;
    L.n = n;
    L.in.assign(1u << n, 0);
    std::mt19937 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (auto& b : L.in) b = coin(rng) ? 1 : 0;
    return L;
}

inline std::string matrix_csv(const Mat& m) {
    std::ostringstream os;
    for (const auto& row : m) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) os << ',';
            os << rat_str(row[j]);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace wefc
