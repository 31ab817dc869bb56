#pragma once

// Perfect-matching polytope laboratory.
//
// Everything here works on explicit vertex enumerations: the hull of
// (edge-vector, has-matching-bit) pairs over all graphs on n vertices has no
// known compact outer description, so claims about it are checked directly
// against the vertex list.  n stays small (<= 6: 2^15 graphs).

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "wefc/rat.hpp"

namespace wefc {

// Edge-indexed 0/1 vector over the complete graph K_n, lexicographic ij
// order: 12, 13, ..., 1n, 23, ..., (n-1)n.
struct GraphVec {
    int n = 0;
    std::vector<std::uint8_t> x;

    GraphVec() = default;
    GraphVec(int n_, std::uint64_t mask) : n(n_), x(num_edges(n_), 0) {
        for (std::size_t e = 0; e < x.size(); ++e)
            x[e] = (mask >> e) & 1;
    }

    static int num_edges(int n) { return n * (n - 1) / 2; }

    // Position of edge ij (1-based endpoints, i < j) in lex order.
    static int edge_index(int n, int i, int j) {
        if (i > j) std::swap(i, j);
        if (i < 1 || j > n || i == j) throw Error("bad edge endpoints");
        return (i - 1) * n - i * (i + 1) / 2 + j - 1;
    }

    bool has_edge(int i, int j) const { return x[edge_index(n, i, j)] != 0; }
};

namespace detail {

// All perfect matchings of K_n, each as a list of lex edge indices.  Built by
// always matching the lowest unmatched vertex; (n-1)!! results.
inline void pm_rec(int n, std::vector<int>& matched, std::vector<int>& edges,
                   std::vector<std::vector<int>>& out) {
    int i = 1;
    while (i <= n && matched[i]) ++i;
    if (i > n) {
        out.push_back(edges);
        return;
    }
    matched[i] = 1;
    for (int j = i + 1; j <= n; ++j) {
        if (matched[j]) continue;
        matched[j] = 1;
        edges.push_back(GraphVec::edge_index(n, i, j));
        pm_rec(n, matched, edges, out);
        edges.pop_back();
        matched[j] = 0;
    }
    matched[i] = 0;
}

}  // namespace detail

inline const std::vector<std::vector<int>>& all_perfect_matchings(int n) {
    if (n <= 0 || n % 2) throw Error("perfect matchings need even n >= 2");
    static std::vector<std::vector<std::vector<int>>> cache(16);
    if (n >= static_cast<int>(cache.size()))
        throw Error("n too large for matching enumeration");
    if (cache[n].empty()) {
        std::vector<int> matched(n + 1, 0), edges;
        detail::pm_rec(n, matched, edges, cache[n]);
    }
    return cache[n];
}

inline int double_factorial_odd(int n) {
    // (n-1)!! for even n: number of perfect matchings of K_n.
    int r = 1;
    for (int k = n - 1; k > 1; k -= 2) r *= k;
    return r;
}

// Brute force: does g contain a perfect matching?
inline bool has_pm(const GraphVec& g) {
    if (g.n % 2) throw Error("has_pm: odd vertex count");
    for (const auto& pm : all_perfect_matchings(g.n)) {
        bool all = true;
        for (int e : pm)
            if (!g.x[e]) {
                all = false;
                break;
            }
        if (all) return true;
    }
    return false;
}

// (x, w_x) for every graph on n vertices, in mask order.
struct PMVertex {
    GraphVec g;
    int w;
};

inline std::vector<PMVertex> pm_vertex_set(int n) {
    int E = GraphVec::num_edges(n);
    if (E > 20) throw Error("vertex set too large to enumerate");
    std::vector<PMVertex> out;
    out.reserve(std::size_t(1) << E);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << E); ++mask) {
        GraphVec g(n, mask);
        out.push_back({g, has_pm(g) ? 1 : 0});
    }
    return out;
}

// --------------------------------------------------------------------------
// Face identity: 1'x + (1-w) n^2 >= n/2 holds on every vertex, with equality
// exactly on {(perfect matching of K_n, 1)}.

struct EpFaceReport {
    bool valid_everywhere = false;
    bool tight_exactly_matchings = false;
    int tight_count = 0;
};

inline EpFaceReport check_ep_face(int n) {
    EpFaceReport rep;
    rep.valid_everywhere = true;
    rep.tight_exactly_matchings = true;
    for (const auto& v : pm_vertex_set(n)) {
        long ones = 0;
        for (auto b : v.g.x) ones += b;
        long lhs = ones + long(1 - v.w) * n * n;
        long rhs = n / 2;
        if (lhs < rhs) rep.valid_everywhere = false;
        bool tight = (lhs == rhs);
        bool is_pm_vertex = (v.w == 1) && (ones == n / 2) && has_pm(v.g);
        if (tight) {
            ++rep.tight_count;
            if (!is_pm_vertex) rep.tight_exactly_matchings = false;
        } else if (is_pm_vertex) {
            rep.tight_exactly_matchings = false;
        }
    }
    return rep;
}

// --------------------------------------------------------------------------
// Objective semantics on the hull itself: maximize c(x_bar)'x + d w over the
// vertex list, where c is +1 on edges of x_bar and -1 off it.

struct Prop2Report {
    Rat z_star;
    int maximizer_count = 0;
    GraphVec arg_x;
    int arg_w = 0;
    bool matches_expectation = false;  // z* = m+d with matching, else z* = m
};

inline Prop2Report check_prop2(const GraphVec& x_bar, const Rat& d) {
    Prop2Report rep;
    int m = 0;
    for (auto b : x_bar.x) m += b;
    bool first = true;
    for (const auto& v : pm_vertex_set(x_bar.n)) {
        Rat z = 0;
        for (std::size_t e = 0; e < v.g.x.size(); ++e)
            z += Rat(x_bar.x[e] ? 1 : -1) * Rat(int(v.g.x[e]));
        z += d * v.w;
        if (first || z > rep.z_star) {
            rep.z_star = z;
            rep.maximizer_count = 1;
            rep.arg_x = v.g;
            rep.arg_w = v.w;
            first = false;
        } else if (z == rep.z_star) {
            ++rep.maximizer_count;
        }
    }
    Rat expect = has_pm(x_bar) ? Rat(m) + d : Rat(m);
    rep.matches_expectation =
        (rep.z_star == expect) && (rep.maximizer_count == 1) &&
        (rep.arg_x.x == x_bar.x) && (rep.arg_w == (has_pm(x_bar) ? 1 : 0));
    return rep;
}

// --------------------------------------------------------------------------
// Classic outer description of the matching-vector hull: degree equalities
// plus odd-set cut rows.  Checked pointwise over all 0/1 vectors.

struct OddSetReport {
    bool matchings_satisfy_all = false;
    bool zero_one_solutions_are_matchings = false;
    int odd_set_rows = 0;
};

inline OddSetReport check_odd_set(int n) {
    OddSetReport rep;
    int E = GraphVec::num_edges(n);
    std::vector<std::vector<int>> odd_sets;
    for (std::uint64_t s = 1; s < (std::uint64_t(1) << n); ++s) {
        std::vector<int> verts;
        for (int i = 1; i <= n; ++i)
            if ((s >> (i - 1)) & 1) verts.push_back(i);
        if (verts.size() % 2) odd_sets.push_back(std::move(verts));
    }
    rep.odd_set_rows = static_cast<int>(odd_sets.size());

    auto degree = [&](const GraphVec& g, int i) {
        int deg = 0;
        for (int j = 1; j <= n; ++j)
            if (j != i && g.has_edge(i, j)) ++deg;
        return deg;
    };
    auto crossing = [&](const GraphVec& g, const std::vector<int>& set) {
        std::vector<std::uint8_t> in(n + 1, 0);
        for (int v : set) in[v] = 1;
        int c = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (in[i] != in[j] && g.has_edge(i, j)) ++c;
        return c;
    };

    rep.matchings_satisfy_all = true;
    rep.zero_one_solutions_are_matchings = true;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << E); ++mask) {
        GraphVec g(n, mask);
        bool deg_ok = true;
        for (int i = 1; i <= n; ++i)
            if (degree(g, i) != 1) {
                deg_ok = false;
                break;
            }
        bool cuts_ok = true;
        if (deg_ok)
            for (const auto& s : odd_sets)
                if (crossing(g, s) < 1) {
                    cuts_ok = false;
                    break;
                }
        bool satisfies = deg_ok && cuts_ok;
        // A 0/1 point with every degree exactly 1 is a perfect matching.
        bool is_pm = deg_ok;
        if (is_pm && !satisfies) rep.matchings_satisfy_all = false;
        if (satisfies && !is_pm) rep.zero_one_solutions_are_matchings = false;
    }
    return rep;
}

// --------------------------------------------------------------------------
// Appendix constructions: the valid inequality w >= sum_{ij in M} x_ij - n/2
// + 1 per perfect matching M, its facet certificate, and the hypo-matchable
// upper bounds w <= sum_{ij not in S} x_ij.

// S (an edge set) is hypo-matchable when G(S) has no perfect matching but
// adding any single missing edge creates one.
inline bool is_hypo_matchable(const GraphVec& s) {
    if (has_pm(s)) return false;
    for (std::size_t e = 0; e < s.x.size(); ++e) {
        if (s.x[e]) continue;
        GraphVec t = s;
        t.x[e] = 1;
        if (!has_pm(t)) return false;
    }
    return true;
}

inline std::vector<GraphVec> hypo_matchable_sets(int n) {
    std::vector<GraphVec> out;
    int E = GraphVec::num_edges(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << E); ++mask) {
        GraphVec g(n, mask);
        if (is_hypo_matchable(g)) out.push_back(g);
    }
    return out;
}

struct AppendixReport {
    bool lower_rows_valid = false;   // w >= sum_M x - n/2 + 1, every M
    bool upper_rows_valid = false;   // w <= sum_{not in S} x, every hypo S
    int hypo_count = 0;
    bool matrix_block_structure = false;
    bool matrix_nonsingular = false;
    int matrix_dim = 0;
};

namespace detail {

// Exact elimination; returns true when the matrix has full rank.
inline bool nonsingular(std::vector<std::vector<Rat>> a) {
    int nn = static_cast<int>(a.size());
    for (int col = 0; col < nn; ++col) {
        int piv = -1;
        for (int r = col; r < nn; ++r)
            if (a[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return false;
        std::swap(a[col], a[piv]);
        for (int r = col + 1; r < nn; ++r) {
            if (a[r][col] == 0) continue;
            Rat f = a[r][col] / a[col][col];
            for (int c = col; c < nn; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return true;
}

}  // namespace detail

// Rows of the facet certificate for matching M: the tight vertices
// (M plus one outside edge | M minus one of its edges | M itself),
// columns (outside edges in lex order | M edges | w).
inline std::vector<std::vector<Rat>> appendix_matrix(int n,
                                                     const std::vector<int>& M) {
    int E = GraphVec::num_edges(n);
    std::vector<std::uint8_t> inM(E, 0);
    for (int e : M) inM[e] = 1;
    std::vector<int> outside, inside;
    for (int e = 0; e < E; ++e)
        (inM[e] ? inside : outside).push_back(e);
    auto row_for = [&](const GraphVec& g, int w) {
        std::vector<Rat> row;
        row.reserve(E + 1);
        for (int e : outside) row.push_back(Rat(int(g.x[e])));
        for (int e : inside) row.push_back(Rat(int(g.x[e])));
        row.push_back(Rat(w));
        return row;
    };
    std::vector<std::vector<Rat>> A;
    GraphVec base(n, 0);
    for (int e : M) base.x[e] = 1;
    for (int e : outside) {
        GraphVec g = base;
        g.x[e] = 1;
        A.push_back(row_for(g, 1));
    }
    for (int e : inside) {
        GraphVec g = base;
        g.x[e] = 0;
        A.push_back(row_for(g, 0));
    }
    A.push_back(row_for(base, 1));
    return A;
}

inline AppendixReport check_appendix_facets(int n) {
    AppendixReport rep;
    auto verts = pm_vertex_set(n);
    int half = n / 2;

    rep.lower_rows_valid = true;
    for (const auto& M : all_perfect_matchings(n)) {
        for (const auto& v : verts) {
            int s = 0;
            for (int e : M) s += v.g.x[e];
            if (v.w < s - half + 1) {
                rep.lower_rows_valid = false;
                break;
            }
        }
        if (!rep.lower_rows_valid) break;
    }

    auto hypos = hypo_matchable_sets(n);
    rep.hypo_count = static_cast<int>(hypos.size());
    rep.upper_rows_valid = true;
    for (const auto& S : hypos) {
        for (const auto& v : verts) {
            int s = 0;
            for (std::size_t e = 0; e < S.x.size(); ++e)
                if (!S.x[e]) s += v.g.x[e];
            if (v.w > s) {
                rep.upper_rows_valid = false;
                break;
            }
        }
        if (!rep.upper_rows_valid) break;
    }

    // Facet certificate for the first matching; block structure then rank.
    const auto& M = all_perfect_matchings(n)[0];
    auto A = appendix_matrix(n, M);
    int t = GraphVec::num_edges(n) - half;
    rep.matrix_dim = static_cast<int>(A.size());
    rep.matrix_block_structure = (rep.matrix_dim == t + half + 1);
    for (int r = 0; r < t && rep.matrix_block_structure; ++r)
        for (int c = 0; c < rep.matrix_dim; ++c) {
            Rat want = (c < t) ? Rat(r == c ? 1 : 0) : Rat(1);
            if (A[r][c] != want) rep.matrix_block_structure = false;
        }
    for (int r = 0; r < half && rep.matrix_block_structure; ++r)
        for (int c = 0; c < rep.matrix_dim; ++c) {
            Rat want;
            if (c < t)
                want = 0;
            else if (c < t + half)
                want = Rat((c - t) == r ? 0 : 1);
            else
                want = 0;
            if (A[t + r][c] != want) rep.matrix_block_structure = false;
        }
    if (rep.matrix_block_structure)
        for (int c = 0; c < rep.matrix_dim; ++c) {
            Rat want = (c < t) ? Rat(0) : Rat(1);
            if (A[t + half][c] != want) rep.matrix_block_structure = false;
        }
    rep.matrix_nonsingular = detail::nonsingular(A);
    return rep;
}

// --------------------------------------------------------------------------
// Input helpers.

// Parses "12,34" style edge lists or a 0/1 string of length C(n,2).
inline GraphVec parse_graph(int n, const std::string& text) {
    GraphVec g(n, 0);
    int E = GraphVec::num_edges(n);
    bool bitstring = (static_cast<int>(text.size()) == E);
    if (bitstring)
        for (char ch : text)
            if (ch != '0' && ch != '1') {
                bitstring = false;
                break;
            }
    if (bitstring) {
        for (int e = 0; e < E; ++e) g.x[e] = (text[e] == '1');
        return g;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - pos);
        if (tok.size() != 2 || !std::isdigit((unsigned char)tok[0]) ||
            !std::isdigit((unsigned char)tok[1]))
            throw Error("bad edge token '" + tok + "' (want e.g. 12,34)");
        g.x[GraphVec::edge_index(n, tok[0] - '0', tok[1] - '0')] = 1;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return g;
}

}  // namespace wefc
