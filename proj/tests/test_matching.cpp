#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "wefc/matching.hpp"

using namespace wefc;

TEST_CASE("edge indexing is lexicographic") {
    CHECK(GraphVec::edge_index(4, 1, 2) == 0);
    CHECK(GraphVec::edge_index(4, 1, 3) == 1);
    CHECK(GraphVec::edge_index(4, 1, 4) == 2);
    CHECK(GraphVec::edge_index(4, 2, 3) == 3);
    CHECK(GraphVec::edge_index(4, 2, 4) == 4);
    CHECK(GraphVec::edge_index(4, 3, 4) == 5);
    CHECK(GraphVec::edge_index(4, 4, 3) == 5);  // endpoints normalize
    CHECK(GraphVec::edge_index(6, 5, 6) == 14);
    CHECK(GraphVec::edge_index(6, 1, 6) == 4);
    CHECK_THROWS_AS(GraphVec::edge_index(4, 0, 2), Error);
    CHECK_THROWS_AS(GraphVec::edge_index(4, 2, 5), Error);
    CHECK_THROWS_AS(GraphVec::edge_index(4, 3, 3), Error);
}

TEST_CASE("perfect matching enumeration") {
    CHECK(double_factorial_odd(2) == 1);
    CHECK(double_factorial_odd(4) == 3);
    CHECK(double_factorial_odd(6) == 15);
    for (int n : {2, 4, 6}) {
        const auto& pms = all_perfect_matchings(n);
        CHECK(static_cast<int>(pms.size()) ==
              double_factorial_odd(n));
        for (const auto& pm : pms) {
            CHECK(static_cast<int>(pm.size()) == n / 2);
            // Each matching covers every vertex exactly once.
            std::vector<int> deg(n + 1, 0);
            for (int e : pm) {
                for (int i = 1; i <= n; ++i)
                    for (int j = i + 1; j <= n; ++j)
                        if (GraphVec::edge_index(n, i, j) == e) {
                            ++deg[i];
                            ++deg[j];
                        }
            }
            for (int i = 1; i <= n; ++i) CHECK(deg[i] == 1);
        }
    }
    // First 4-vertex matching pairs 12 with 34.
    CHECK(all_perfect_matchings(4)[0] ==
          std::vector<int>{GraphVec::edge_index(4, 1, 2),
                           GraphVec::edge_index(4, 3, 4)});
    CHECK_THROWS_AS(all_perfect_matchings(3), Error);
}

TEST_CASE("has_pm hand cases") {
    CHECK(has_pm(parse_graph(2, "12")));
    CHECK(!has_pm(GraphVec(2, 0)));
    CHECK(has_pm(GraphVec(4, 0x3f)));          // complete graph
    CHECK(has_pm(parse_graph(4, "12,34")));
    CHECK(has_pm(parse_graph(4, "13,24")));
    CHECK(!has_pm(parse_graph(4, "12,23")));   // path misses vertex 4
    CHECK(!has_pm(parse_graph(4, "12,13,23")));  // triangle isolates 4
    CHECK(!has_pm(GraphVec(4, 0)));
}

TEST_CASE("graph parsing") {
    GraphVec g = parse_graph(4, "12,34");
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(3, 4));
    CHECK(!g.has_edge(1, 3));
    GraphVec h = parse_graph(4, "100001");
    CHECK(h.x == g.x);
    CHECK_THROWS_AS(parse_graph(4, "1,2"), Error);
    CHECK_THROWS_AS(parse_graph(4, "125"), Error);
}

TEST_CASE("face validity and tightness counts") {
    for (int n : {2, 4, 6}) {
        EpFaceReport rep = check_ep_face(n);
        CHECK(rep.valid_everywhere);
        CHECK(rep.tight_exactly_matchings);
        CHECK(rep.tight_count == double_factorial_odd(n));
    }
}

TEST_CASE("decision objective over the vertex set") {
    // Complete graph: six ones, matching exists.
    Prop2Report full = check_prop2(GraphVec(4, 0x3f), Rat(1, 2));
    CHECK(full.matches_expectation);
    CHECK(full.z_star == Rat(13, 2));
    CHECK(full.maximizer_count == 1);
    CHECK(full.arg_w == 1);

    // Path 12,23: two ones, no matching: optimum sticks at m.
    Prop2Report path = check_prop2(parse_graph(4, "12,23"), Rat(1, 2));
    CHECK(path.matches_expectation);
    CHECK(path.z_star == Rat(2));
    CHECK(path.arg_w == 0);

    // Empty graph: optimum 0 at the origin.
    Prop2Report empty = check_prop2(GraphVec(4, 0), Rat(1, 2));
    CHECK(empty.matches_expectation);
    CHECK(empty.z_star == Rat(0));

    std::mt19937 rng(4242);
    std::uniform_int_distribution<std::uint64_t> dist(0, 63);
    for (int trial = 0; trial < 20; ++trial) {
        GraphVec x_bar(4, dist(rng));
        CHECK(check_prop2(x_bar, Rat(1, 3)).matches_expectation);
        CHECK(check_prop2(x_bar, Rat(1, 2)).matches_expectation);
    }
}

TEST_CASE("degree plus odd-set description") {
    OddSetReport r4 = check_odd_set(4);
    CHECK(r4.matchings_satisfy_all);
    CHECK(r4.zero_one_solutions_are_matchings);
    CHECK(r4.odd_set_rows == 8);

    OddSetReport r6 = check_odd_set(6);
    CHECK(r6.matchings_satisfy_all);
    CHECK(r6.zero_one_solutions_are_matchings);
    CHECK(r6.odd_set_rows == 32);
}

TEST_CASE("hypo-matchable edge sets on four vertices") {
    CHECK(is_hypo_matchable(parse_graph(4, "12,13,23")));  // triangle
    CHECK(is_hypo_matchable(parse_graph(4, "12,13,14")));  // star
    CHECK(!is_hypo_matchable(parse_graph(4, "12,23")));    // path
    CHECK(!is_hypo_matchable(parse_graph(4, "12")));
    CHECK(!is_hypo_matchable(GraphVec(4, 0)));
    CHECK(!is_hypo_matchable(GraphVec(4, 0x3f)));  // already matchable

    auto hypos = hypo_matchable_sets(4);
    CHECK(hypos.size() == 8);  // 4 triangles + 4 stars
    for (const auto& s : hypos) {
        int edges = 0;
        for (auto b : s.x) edges += b;
        CHECK(edges == 3);
    }
}

TEST_CASE("facet certificate matrix") {
    AppendixReport r4 = check_appendix_facets(4);
    CHECK(r4.lower_rows_valid);
    CHECK(r4.upper_rows_valid);
    CHECK(r4.hypo_count == 8);
    CHECK(r4.matrix_dim == 7);
    CHECK(r4.matrix_block_structure);
    CHECK(r4.matrix_nonsingular);

    // Certificate matrix alone scales to six vertices.
    auto A6 = appendix_matrix(6, all_perfect_matchings(6)[0]);
    CHECK(A6.size() == 16);
    CHECK(detail::nonsingular(A6));
}

TEST_CASE("certificate matrix determinant intuition stays nonzero") {
    // The inside block is J - I on n/2 columns; its determinant is n/2 - 1
    // times (-1)^(n/2-1), nonzero for every even n >= 2.  Spot-check the
    // full elimination against that block alone.
    for (int n : {2, 4, 6}) {
        int half = n / 2;
        std::vector<std::vector<Rat>> jmi(half, std::vector<Rat>(half, Rat(1)));
        for (int i = 0; i < half; ++i) jmi[i][i] = Rat(0);
        if (half == 1)
            CHECK(!detail::nonsingular(jmi));  // 1x1 zero matrix
        else
            CHECK(detail::nonsingular(jmi));
    }
}
