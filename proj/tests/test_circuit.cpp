#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "wefc/circuit.hpp"
#include "wefc/lp.hpp"
#include "wefc/matching.hpp"

using namespace wefc;

namespace {

// Pins the circuit inputs to bits, then demands the encoded system admit
// exactly one point, integral, agreeing with direct evaluation.
void require_unique_extension(const Circuit& c, const WEFSystem& sys,
                              std::uint64_t mask) {
    std::vector<std::uint8_t> input(c.q());
    for (int i = 0; i < c.q(); ++i) input[i] = (mask >> i) & 1;
    std::vector<std::pair<VarId, Rat>> pins;
    for (int i = 0; i < c.q(); ++i) pins.push_back({sys.x_vars[i], Rat(input[i])});
    LPSystem fixed = fix_vars(sys.lp, pins);

    PropResult prop = propagate_bounds(fixed);
    REQUIRE(!prop.infeasible);
    std::vector<Rat> point;
    if (prop.all_fixed()) {
        point = prop.lo;
        REQUIRE(fixed.point_feasible(point));
    } else {
        std::vector<VarId> all(fixed.num_vars());
        for (int v = 0; v < fixed.num_vars(); ++v) all[v] = v;
        auto rg = range_all(fixed, all);
        for (int v = 0; v < fixed.num_vars(); ++v) {
            REQUIRE(rg[v].first == rg[v].second);
            point.push_back(rg[v].first);
        }
    }
    EvalResult ev = eval(c, input);
    for (int g = 0; g < c.t(); ++g) {
        REQUIRE(rat_is_01(point[c.q() + g]));
        REQUIRE(rat_to_long(point[c.q() + g]) == ev.gate_values[g]);
    }
    REQUIRE(rat_to_long(point[sys.w_var]) == ev.w);
}

void require_unique_everywhere(const Circuit& c) {
    WEFSystem sys = encode(c);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << c.q()); ++mask)
        require_unique_extension(c, sys, mask);
}

}  // namespace

TEST_CASE("evaluation matches gate semantics") {
    CircuitBuilder ba({"a", "b"});
    ba.g_and(ba.in(0), ba.in(1), "y");
    Circuit c_and = ba.take("y");
    CircuitBuilder bo({"a", "b"});
    bo.g_or(bo.in(0), bo.in(1), "y");
    Circuit c_or = bo.take("y");
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            CHECK(eval(c_and, {std::uint8_t(a), std::uint8_t(b)}).w == (a & b));
            CHECK(eval(c_or, {std::uint8_t(a), std::uint8_t(b)}).w == (a | b));
        }

    // Negated literals evaluate through 1 - v.
    CircuitBuilder bn({"a", "b"});
    bn.g_or(bn.in(0), CircuitBuilder::neg(bn.in(1)), "y");
    Circuit c_orn = bn.take("y");
    CHECK(eval(c_orn, {0, 0}).w == 1);
    CHECK(eval(c_orn, {0, 1}).w == 0);
    CHECK(eval(c_orn, {1, 1}).w == 1);
}

TEST_CASE("encoded gates pin the output exactly") {
    CircuitBuilder ba({"a", "b"});
    ba.g_and(ba.in(0), ba.in(1), "y");
    Circuit c_and = ba.take("y");
    WEFSystem sys_and = encode(c_and);
    CHECK(sys_and.stats.num_constraints == 4);
    CHECK(sys_and.stats.num_vars == 3);

    CircuitBuilder bo({"a", "b"});
    bo.g_or(bo.in(0), bo.in(1), "y");
    Circuit c_or = bo.take("y");
    WEFSystem sys_or = encode(c_or);

    // 8 fixed-input truth-table rows across the two gates.
    require_unique_everywhere(c_and);
    require_unique_everywhere(c_or);

    // Output range collapses to a point once inputs are pinned: AND at
    // (0,0) sits at zero.
    LPSystem f00 = fix_vars(sys_and.lp,
                            {{sys_and.x_vars[0], Rat(0)},
                             {sys_and.x_vars[1], Rat(0)}});
    auto rg = var_range(f00, sys_and.w_var);
    CHECK(rg.first == Rat(0));
    CHECK(rg.second == Rat(0));

    // OR with a negated operand is forced to 1 at (0,0).
    CircuitBuilder bn({"a", "b"});
    bn.g_or(bn.in(0), CircuitBuilder::neg(bn.in(1)), "y");
    Circuit c_orn = bn.take("y");
    require_unique_everywhere(c_orn);
    WEFSystem sys_orn = encode(c_orn);
    LPSystem fn00 = fix_vars(sys_orn.lp,
                             {{sys_orn.x_vars[0], Rat(0)},
                              {sys_orn.x_vars[1], Rat(0)}});
    auto rgn = var_range(fn00, sys_orn.w_var);
    CHECK(rgn.first == Rat(1));
    CHECK(rgn.second == Rat(1));
}

TEST_CASE("matching circuit agrees with the matching oracle") {
    Circuit c = pm4_circuit();
    CHECK(c.q() == 6);
    CHECK(c.t() == 5);
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
        std::vector<std::uint8_t> in(6);
        for (int i = 0; i < 6; ++i) in[i] = (mask >> i) & 1;
        CHECK(eval(c, in).w == (has_pm(GraphVec(4, mask)) ? 1 : 0));
    }

    Circuit cp = pm4_circuit_paper();
    CHECK(cp.q() == 6);
    CHECK(cp.t() == 7);
    int ands = 0, ors = 0;
    for (const auto& g : cp.gates)
        (g.kind == CGate::Kind::And ? ands : ors)++;
    CHECK(ands == 5);
    CHECK(ors == 2);
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
        std::vector<std::uint8_t> in(6);
        for (int i = 0; i < 6; ++i) in[i] = (mask >> i) & 1;
        CHECK(eval(cp, in).w == eval(c, in).w);
    }
}

TEST_CASE("encoding size is four rows per gate") {
    WEFSystem sys = encode(pm4_circuit());
    CHECK(sys.stats.num_constraints == 20);
    CHECK(sys.stats.num_vars == 11);
    CHECK(sys.x_vars.size() == 6);
    CHECK(sys.w_var == 10);

    WEFSystem sysp = encode(pm4_circuit_paper());
    CHECK(sysp.stats.num_constraints == 28);
    CHECK(sysp.stats.num_vars == 13);
}

TEST_CASE("every gate prefix keeps unique extensions") {
    Circuit full = pm4_circuit();
    for (int keep = 1; keep <= full.t(); ++keep) {
        Circuit prefix;
        prefix.inputs = full.inputs;
        prefix.gates.assign(full.gates.begin(), full.gates.begin() + keep);
        require_unique_everywhere(prefix);
    }
}

TEST_CASE("xor builder expands to three gates") {
    CircuitBuilder b({"a", "b"});
    b.g_xor(b.in(0), b.in(1), "y");
    Circuit c = b.take("y");
    CHECK(c.t() == 3);
    for (int a = 0; a <= 1; ++a)
        for (int bv = 0; bv <= 1; ++bv)
            CHECK(eval(c, {std::uint8_t(a), std::uint8_t(bv)}).w == (a ^ bv));
    require_unique_everywhere(c);
}

TEST_CASE("text format round trip") {
    Circuit c = pm4_circuit();
    std::string text = print_circuit(c);
    Circuit back = parse_circuit(text);
    REQUIRE(back.q() == c.q());
    REQUIRE(back.t() == c.t());
    CHECK(back.inputs == c.inputs);
    for (int g = 0; g < c.t(); ++g) {
        CHECK(back.gates[g].name == c.gates[g].name);
        CHECK(back.gates[g].kind == c.gates[g].kind);
        CHECK(back.gates[g].a.ref == c.gates[g].a.ref);
        CHECK(back.gates[g].a.neg == c.gates[g].a.neg);
        CHECK(back.gates[g].b.ref == c.gates[g].b.ref);
        CHECK(back.gates[g].b.neg == c.gates[g].b.neg);
    }

    Circuit sym = parse_circuit(
        "INPUTS 2\n"
        "y = x1 & !x2\n"
        "OUTPUT y\n");
    CHECK(sym.inputs == std::vector<std::string>{"x1", "x2"});
    CHECK(sym.gates[0].b.neg);
    CHECK(eval(sym, {1, 0}).w == 1);
    CHECK(eval(sym, {1, 1}).w == 0);

    CHECK_THROWS_AS(parse_circuit("INPUTS 2\ny = x1 & zz\nOUTPUT y\n"), Error);
    CHECK_THROWS_AS(parse_circuit("INPUTS 2\ny = x1 & x2\nOUTPUT q\n"), Error);
    CHECK_THROWS_AS(parse_circuit("INPUTS 1 a\n"), Error);
}

TEST_CASE("validation rejects malformed circuits") {
    Circuit c;
    c.inputs = {"a"};
    c.gates.push_back({CGate::Kind::And, {0, false}, {1, false}, "y"});
    CHECK_THROWS_AS(c.validate(), Error);  // reads itself

    Circuit d;
    d.inputs = {"a", "b"};
    d.gates.push_back({CGate::Kind::And, {0, false}, {1, false}, "a"});
    CHECK_THROWS_AS(d.validate(), Error);  // duplicate name

    Circuit e;
    e.inputs = {"a"};
    CHECK_THROWS_AS(e.validate(), Error);  // no gates
}
