#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "wefc/lp.hpp"

using namespace wefc;

namespace {

Rat Q(const char* s) { return rat_parse(s); }

}  // namespace

TEST_CASE("box optimum sits on a corner") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    VarId y = sys.add_var("y");
    OptResult r = solve(sys, Objective{{{x, Rat(1)}, {y, Rat(2)}}});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.z == 3);
    CHECK(r.point[x] == 1);
    CHECK(r.point[y] == 1);
    r = solve(sys, Objective{{{x, Rat(-1)}, {y, Rat(-2)}}});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.z == 0);
}

TEST_CASE("a single inequality cuts the box") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    VarId y = sys.add_var("y");
    sys.add_le({{x, Rat(1)}, {y, Rat(1)}}, Q("1/2"));
    OptResult r = solve(sys, Objective{{{x, Rat(1)}, {y, Rat(1)}}});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(rat_str(r.z) == "1/2");
    CHECK(r.point[x] + r.point[y] == Q("1/2"));
    r = solve(sys, Objective{{{x, Rat(1)}}});
    CHECK(rat_str(r.z) == "1/2");
}

TEST_CASE("equality rows force a feasibility phase") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    VarId y = sys.add_var("y");
    sys.add_eq({{x, Rat(1)}, {y, Rat(1)}}, Rat(1));
    OptResult r = solve(sys, Objective{{{x, Rat(1)}, {y, Rat(-1)}}});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.z == 1);
    CHECK(r.point[x] == 1);
    CHECK(r.point[y] == 0);
    r = solve(sys, Objective{{{x, Rat(-1)}, {y, Rat(1)}}});
    CHECK(r.z == 1);
    CHECK(r.point[x] == 0);
}

TEST_CASE("greater-equal rows") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    VarId y = sys.add_var("y");
    sys.add_ge({{x, Rat(1)}, {y, Rat(1)}}, Q("3/2"));
    OptResult r = solve(sys, Objective{{{x, Rat(-1)}, {y, Rat(-1)}}});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(rat_str(r.z) == "-3/2");
}

TEST_CASE("contradictory rows are infeasible") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    sys.add_ge({{x, Rat(1)}}, Q("3/4"));
    sys.add_le({{x, Rat(1)}}, Q("1/4"));
    CHECK(!feasible(sys));
    OptResult r = solve(sys, Objective{{{x, Rat(1)}}});
    CHECK(r.status == SolveStatus::Infeasible);
    CHECK_THROWS_AS(var_range(sys, x), Error);
}

TEST_CASE("doubly stochastic matrices optimize at permutations") {
    LPSystem sys;
    std::vector<std::vector<VarId>> v(3, std::vector<VarId>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            v[i][j] = sys.add_var("m" + std::to_string(i) + std::to_string(j));
    for (int i = 0; i < 3; ++i) {
        sys.add_eq({{v[i][0], Rat(1)}, {v[i][1], Rat(1)}, {v[i][2], Rat(1)}}, Rat(1));
        sys.add_eq({{v[0][i], Rat(1)}, {v[1][i], Rat(1)}, {v[2][i], Rat(1)}}, Rat(1));
    }
    Simplex engine(sys);

    Objective trace{{{v[0][0], Rat(1)}, {v[1][1], Rat(1)}, {v[2][2], Rat(1)}}};
    OptResult r = engine.maximize(trace);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.z == 3);

    // Random costs: the optimum must match the best of the 6 permutations.
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> coin(-5, 5);
    int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int trial = 0; trial < 12; ++trial) {
        Objective obj;
        Rat cost[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cost[i][j] = Rat(coin(rng), 2);
                obj.terms.push_back({v[i][j], cost[i][j]});
            }
        Rat best;
        bool first = true;
        for (auto& p : perms) {
            Rat s = cost[0][p[0]] + cost[1][p[1]] + cost[2][p[2]];
            if (first || s > best) best = s;
            first = false;
        }
        OptResult rr = engine.maximize(obj);
        REQUIRE(rr.status == SolveStatus::Optimal);
        CHECK(rr.z == best);
        OptResult fresh = solve(sys, obj);
        CHECK(fresh.z == rr.z);
    }
}

TEST_CASE("hull of listed points by convex multipliers") {
    // Points (x, w): (0,0), (1,1), (1/4,1).
    LPSystem sys;
    VarId l1 = sys.add_var("l1"), l2 = sys.add_var("l2"), l3 = sys.add_var("l3");
    VarId x = sys.add_var("x"), w = sys.add_var("w");
    sys.add_eq({{l1, Rat(1)}, {l2, Rat(1)}, {l3, Rat(1)}}, Rat(1));
    sys.add_eq({{x, Rat(1)}, {l2, Rat(-1)}, {l3, Q("-1/4")}}, Rat(0));
    sys.add_eq({{w, Rat(1)}, {l2, Rat(-1)}, {l3, Rat(-1)}}, Rat(0));
    Rat px[3] = {Rat(0), Rat(1), Q("1/4")};
    Rat pw[3] = {Rat(0), Rat(1), Rat(1)};
    Rat cases[4][2] = {{Rat(1), Rat(1)},
                       {Rat(-1), Q("1/2")},
                       {Rat(-1), Q("1/8")},
                       {Rat(2), Rat(-3)}};
    Simplex engine(sys);
    for (auto& cs : cases) {
        OptResult r = engine.maximize(Objective{{{x, cs[0]}, {w, cs[1]}}});
        REQUIRE(r.status == SolveStatus::Optimal);
        Rat best = cs[0] * px[0] + cs[1] * pw[0];
        for (int k = 1; k < 3; ++k) {
            Rat s = cs[0] * px[k] + cs[1] * pw[k];
            if (s > best) best = s;
        }
        CHECK(r.z == best);
    }
}

TEST_CASE("replays are bit-for-bit identical") {
    LPSystem sys;
    VarId x = sys.add_var("x"), y = sys.add_var("y"), z = sys.add_var("z");
    sys.add_le({{x, Rat(2)}, {y, Rat(-1)}, {z, Rat(1)}}, Q("4/3"));
    sys.add_ge({{x, Rat(1)}, {y, Rat(1)}}, Q("1/3"));
    sys.add_eq({{y, Rat(1)}, {z, Rat(2)}}, Rat(1));
    Objective obj{{{x, Rat(3)}, {y, Rat(1)}, {z, Rat(-2)}}};
    OptResult a = solve(sys, obj);
    OptResult b = solve(sys, obj);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK(rat_str(a.z) == rat_str(b.z));
    for (int v = 0; v < sys.num_vars(); ++v)
        CHECK(rat_str(a.point[v]) == rat_str(b.point[v]));
}

TEST_CASE("fix_vars pins values and validates them") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    VarId y = sys.add_var("y");
    sys.add_le({{x, Rat(1)}, {y, Rat(1)}}, Rat(1));
    LPSystem fixed = fix_vars(sys, {{x, Q("1/3")}});
    OptResult r = solve(fixed, Objective{{{y, Rat(1)}}});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(rat_str(r.z) == "2/3");
    CHECK(r.point[x] == Q("1/3"));
    CHECK_THROWS_AS(fix_vars(sys, {{x, Rat(2)}}), Error);
    CHECK_THROWS_AS(fix_vars(sys, {{x, Q("-1/2")}}), Error);
}

TEST_CASE("var_range brackets each variable") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    VarId y = sys.add_var("y");
    sys.add_le({{x, Rat(1)}, {y, Rat(1)}}, Rat(1));
    sys.add_ge({{x, Rat(1)}}, Q("1/4"));
    auto [xlo, xhi] = var_range(sys, x);
    CHECK(rat_str(xlo) == "1/4");
    CHECK(xhi == 1);
    auto [ylo, yhi] = var_range(sys, y);
    CHECK(ylo == 0);
    CHECK(rat_str(yhi) == "3/4");
}

TEST_CASE("propagation derives implied bounds") {
    // Conjunction-shaped rows: y = a & b once a and b are pinned.
    auto build = [](int aval, int bval) {
        LPSystem sys;
        VarId a = sys.add_var("a", Rat(aval), Rat(aval));
        VarId b = sys.add_var("b", Rat(bval), Rat(bval));
        VarId y = sys.add_var("y");
        sys.add_le({{a, Rat(1)}, {b, Rat(1)}, {y, Rat(-1)}}, Rat(1));
        sys.add_le({{a, Rat(-1)}, {y, Rat(1)}}, Rat(0));
        sys.add_le({{b, Rat(-1)}, {y, Rat(1)}}, Rat(0));
        return sys;
    };
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            PropResult p = propagate_bounds(build(a, b));
            REQUIRE(!p.infeasible);
            CHECK(p.all_fixed());
            CHECK(p.lo[2] == Rat(a & b));
        }

    LPSystem bad;
    VarId x = bad.add_var("x");
    bad.add_ge({{x, Rat(1)}}, Q("3/4"));
    bad.add_le({{x, Rat(1)}}, Q("1/4"));
    PropResult p = propagate_bounds(bad);
    CHECK(p.infeasible);
    CHECK(!p.reason.empty());
}

TEST_CASE("range_all matches var_range on random systems") {
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> coef(-2, 2);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_int_distribution<int> sense3(0, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6;
        LPSystem sys;
        std::vector<VarId> vars;
        std::vector<Rat> anchor;
        for (int v = 0; v < n; ++v) {
            vars.push_back(sys.add_var("v" + std::to_string(v)));
            anchor.push_back(Rat(bit(rng)));
        }
        for (int rix = 0; rix < 8; ++rix) {
            std::vector<Term> terms;
            Rat act = 0;
            for (int v = 0; v < n; ++v) {
                int c = coef(rng);
                if (c == 0) continue;
                terms.push_back({v, Rat(c)});
                act += Rat(c) * anchor[v];
            }
            if (terms.empty()) continue;
            int s = sense3(rng);
            // rhs keeps the anchor point feasible, so the system never empties.
            if (s == 0)
                sys.add_le(terms, act + Rat(bit(rng)));
            else if (s == 1)
                sys.add_ge(terms, act - Rat(bit(rng)));
            else
                sys.add_eq(terms, act);
        }
        REQUIRE(sys.point_feasible(anchor));
        auto ranges = range_all(sys, vars);
        for (int v = 0; v < n; ++v) {
            auto [lo, hi] = var_range(sys, vars[v]);
            CHECK(ranges[v].first == lo);
            CHECK(ranges[v].second == hi);
        }
    }
}

TEST_CASE("rows merge duplicate terms and drop zeros") {
    LPSystem sys;
    VarId x = sys.add_var("x");
    VarId y = sys.add_var("y");
    sys.add_le({{x, Rat(1)}, {y, Rat(1)}, {x, Rat(1)}, {y, Rat(-1)}}, Rat(1));
    REQUIRE(sys.cons.size() == 1);
    REQUIRE(sys.cons[0].terms.size() == 1);
    CHECK(sys.cons[0].terms[0].var == x);
    CHECK(sys.cons[0].terms[0].coef == 2);
    OptResult r = solve(sys, Objective{{{x, Rat(1)}}});
    CHECK(rat_str(r.z) == "1/2");
}
