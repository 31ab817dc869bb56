#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "wefc/matching.hpp"
#include "wefc/pseudolang.hpp"

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

std::vector<std::uint8_t> bits_of(std::uint64_t mask, int n) {
    std::vector<std::uint8_t> v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1;
    return v;
}

}  // namespace

TEST_CASE("matching listing parses to twelve lines") {
    BasicProgram bp = parse_program(kMatching4);
    CHECK(bp.l() == 12);
    CHECK(bp.table.q == 10);
    CHECK(bp.table.input_slots.size() == 6);
    CHECK(bp.table.w_slot == 9);
    CHECK(bp.table.W == 0);

    // The label resolves to line 11 from all three jumps.
    CHECK(bp.stmts[3].op == Stmt::Op::IfGoto);
    CHECK(bp.stmts[3].target == 11);
    CHECK(bp.stmts[5].target == 11);
    CHECK(bp.stmts[7].target == 11);
    CHECK(bp.stmts[10].op == Stmt::Op::Const);
    CHECK(bp.stmts[10].a == 1);
    CHECK(bp.stmts[11].op == Stmt::Op::Return);
}

TEST_CASE("interpreter follows the matching control flow") {
    BasicProgram bp = parse_program(kMatching4);

    // 12 and 34 present: the first test fires.
    std::uint64_t mask = 1ull | (1ull << 5);
    Trace tr = interpret(bp, bits_of(mask, 6), 13);
    CHECK(tr.w == 1);
    CHECK(tr.steps_used == 6);
    CHECK(tr.line_at[1] == 1);
    CHECK(tr.line_at[4] == 4);
    CHECK(tr.line_at[5] == 11);
    CHECK(tr.line_at[6] == 12);
    CHECK(tr.line_at[13] == 12);  // return loops in place

    // Empty graph: falls through all three tests.
    Trace no = interpret(bp, bits_of(0, 6), 13);
    CHECK(no.w == 0);
    CHECK(no.steps_used == 10);

    // Against the brute-force matching oracle on all 64 graphs.
    for (std::uint64_t m = 0; m < 64; ++m) {
        Trace t = interpret(bp, bits_of(m, 6), 13);
        CHECK(t.w == (has_pm(GraphVec(4, m)) ? 1 : 0));
        CHECK(t.steps_used <= 13);
    }

    // Determinism: identical traces on repeat runs.
    Trace a = interpret(bp, bits_of(21, 6), 13);
    Trace b = interpret(bp, bits_of(21, 6), 13);
    CHECK(a.mem_at == b.mem_at);
    CHECK(a.line_at == b.line_at);
}

TEST_CASE("step budget is enforced") {
    BasicProgram bp = parse_program(kMatching4);
    CHECK_THROWS_AS(interpret(bp, bits_of(0, 6), 9), Error);   // below length
    CHECK_THROWS_AS(interpret(bp, bits_of(0, 6), 5), Error);
    CHECK_NOTHROW(interpret(bp, bits_of(0, 6), 12));

    // An actual loop forever: while on a bit that stays 1.
    BasicProgram loop = parse_program(
        "bit w c\n"
        "c = 1\n"
        "while c\n"
        "w = 1\n"
        "endwhile\n"
        "return\n");
    CHECK_THROWS_AS(interpret(loop, {}, 40), Error);
}

TEST_CASE("while loops desugar to conditional jumps") {
    BasicProgram bp = parse_program(
        "input a\n"
        "bit w c\n"
        "c = a\n"
        "while c == 1\n"
        "w = 1\n"
        "c = 0\n"
        "endwhile\n"
        "return\n");
    // c=a | if c goto body | goto end | w=1 | c=0 | goto top | return
    CHECK(bp.l() == 7);
    CHECK(bp.stmts[1].op == Stmt::Op::IfGoto);
    CHECK(bp.stmts[1].target == 4);
    CHECK(bp.stmts[2].op == Stmt::Op::Goto);
    CHECK(bp.stmts[2].target == 7);
    CHECK(bp.stmts[5].op == Stmt::Op::Goto);
    CHECK(bp.stmts[5].target == 2);

    Trace on = interpret(bp, {1}, 12);
    CHECK(on.w == 1);
    CHECK(on.steps_used == 8);
    Trace off = interpret(bp, {0}, 12);
    CHECK(off.w == 0);
    CHECK(off.steps_used == 4);
}

TEST_CASE("for loops run inclusively and need no overflow step") {
    BasicProgram bp = parse_program(
        "int i width 2\n"
        "bit w\n"
        "w = 0\n"
        "for i in 0..2\n"
        "w = !w\n"
        "endfor\n"
        "return\n");
    // Three iterations toggle w three times.
    Trace tr = interpret(bp, {}, 24);
    CHECK(tr.w == 1);
    CHECK(tr.steps_used == 17);
    // The loop counter parks at the bound, not past it.
    const IntDecl& i = bp.table.ints.at("i");
    CHECK(int_value(tr.final_memory, i.base, i.width) == 2);

    // Upper bound equal to 2^W - 1 still terminates: counter never wraps.
    BasicProgram full = parse_program(
        "int i width 2\n"
        "bit w\n"
        "w = 0\n"
        "for i in 0..3\n"
        "w = !w\n"
        "endfor\n"
        "return\n");
    Trace tf = interpret(full, {}, 40);
    CHECK(tf.w == 0);  // four toggles

    // A bound past the word size is rejected at parse time.
    CHECK_THROWS_AS(parse_program("int i width 2\nbit w\nfor i in 0..4\nw = 1\n"
                                  "endfor\nreturn\n"),
                    Error);
}

TEST_CASE("increment wraps with a full carry chain") {
    BasicProgram bp = parse_program(
        "int i width 3\n"
        "bit w\n"
        "inc i\ninc i\ninc i\ninc i\ninc i\ninc i\ninc i\ninc i\n"
        "w = 0\n"
        "return\n");
    Trace tr = interpret(bp, {}, 10);
    const IntDecl& i = bp.table.ints.at("i");
    CHECK(int_value(tr.final_memory, i.base, i.width) == 0);  // 7 -> 0
    // The wrapping increment's carries are all ones; the overflow flag is
    // the top carry bit.
    const Stmt& last_inc = bp.stmts[7];
    REQUIRE(last_inc.op == Stmt::Op::Inc);
    CHECK(tr.final_memory[last_inc.carry_base + 0] == 1);
    CHECK(tr.final_memory[last_inc.carry_base + 1] == 1);
    CHECK(tr.final_memory[last_inc.carry_base + 2] == 1);
    // The seventh increment (6 -> 7) carries nothing.
    const Stmt& prev_inc = bp.stmts[6];
    CHECK(tr.final_memory[prev_inc.carry_base + 0] == 0);
    CHECK(tr.final_memory[prev_inc.carry_base + 2] == 0);

    // Intermediate values count 0,1,2,...,7,0.
    for (int t = 1; t <= 8; ++t)
        CHECK(int_value(tr.mem_at[t], i.base, i.width) == (t & 7));
}

TEST_CASE("equality tests compare whole words") {
    BasicProgram bp = parse_program(
        "int a width 2\n"
        "int b width 2\n"
        "bit e w\n"
        "inc a\ninc a\n"
        "inc b\n"
        "e = a == b\n"
        "w = e\n"
        "return\n");
    Trace tr = interpret(bp, {}, 8);
    CHECK(tr.w == 0);  // 2 != 1

    BasicProgram eq = parse_program(
        "int a width 2\n"
        "int b width 2\n"
        "bit e w\n"
        "inc a\ninc b\n"
        "e = (a == b)\n"
        "w = e\n"
        "return\n");
    Trace tr2 = interpret(eq, {}, 8);
    CHECK(tr2.w == 1);
    // Scratch bits hold the per-bit differences (all zero on equality).
    const Stmt& et = eq.stmts[2];
    REQUIRE(et.op == Stmt::Op::EqTest);
    CHECK(tr2.final_memory[et.scratch_base] == 0);
    CHECK(tr2.final_memory[et.scratch_base + 1] == 0);
}

TEST_CASE("one-dimensional arrays read and write by integer index") {
    BasicProgram bp = parse_program(
        "input s\n"
        "int i width 2\n"
        "array R[3]\n"
        "bit out w\n"
        "inc i\ninc i\n"      // i = 2
        "R[i] = s\n"
        "out = R[i]\n"
        "w = out\n"
        "return\n");
    CHECK(bp.table.arrays.at("R").rows == 4);  // max index 3
    Trace t1 = interpret(bp, {1}, 8);
    CHECK(t1.w == 1);
    Trace t0 = interpret(bp, {0}, 8);
    CHECK(t0.w == 0);
    // The selector block of the write marks exactly element 2.
    const Stmt& wr = bp.stmts[2];
    REQUIRE(wr.op == Stmt::Op::AWrite1);
    CHECK(t1.final_memory[wr.selM_base + 0] == 1);
    CHECK(t1.final_memory[wr.selM_base + 1] == 1);
    CHECK(t1.final_memory[wr.selM_base + 2] == 0);
    CHECK(t1.final_memory[wr.selM_base + 3] == 1);
    // Untouched elements stay zero.
    const ArrDecl& R = bp.table.arrays.at("R");
    CHECK(t1.final_memory[R.base + 0] == 0);
    CHECK(t1.final_memory[R.base + 2] == 1);

    // An array longer than the word size allows is rejected.
    CHECK_THROWS_AS(
        parse_program("int i width 1\narray R[2]\nbit w\nreturn\n"), Error);

    // Index past the declared maximum is a runtime error.
    BasicProgram oob = parse_program(
        "input s\n"
        "int i width 2\n"
        "array R[1]\n"
        "bit w\n"
        "inc i\ninc i\n"
        "R[i] = s\n"
        "w = 0\n"
        "return\n");
    CHECK_THROWS_AS(interpret(oob, {1}, 6), Error);
}

TEST_CASE("two-dimensional arrays use row and column selectors") {
    BasicProgram bp = parse_program(
        "input s\n"
        "int i width 2\n"
        "int j width 2\n"
        "array2 T[1][2]\n"
        "bit out w\n"
        "inc i\n"             // i = 1
        "inc j\ninc j\n"      // j = 2
        "T[i][j] = s\n"
        "out = T[i][j]\n"
        "w = out\n"
        "return\n");
    const ArrDecl& T = bp.table.arrays.at("T");
    CHECK(T.rows == 2);
    CHECK(T.cols == 3);
    Trace tr = interpret(bp, {1}, 10);
    CHECK(tr.w == 1);
    // Row-major cell (1,2) holds the bit.
    CHECK(tr.final_memory[T.base + 1 * 3 + 2] == 1);
    CHECK(tr.final_memory[T.base + 0] == 0);
}

TEST_CASE("symmetric writes mirror across the diagonal") {
    BasicProgram bp = parse_program(
        "input s\n"
        "int i width 2\n"
        "int j width 2\n"
        "array2 T[2][2] symmetric\n"
        "bit w\n"
        "inc j\n"             // i = 0, j = 1
        "T[i][j] = s\n"
        "w = s\n"
        "return\n");
    // The single source statement became two writes.
    int writes = 0;
    for (const auto& s : bp.stmts)
        if (s.op == Stmt::Op::AWrite2) ++writes;
    CHECK(writes == 2);
    Trace tr = interpret(bp, {1}, 6);
    const ArrDecl& T = bp.table.arrays.at("T");
    CHECK(tr.final_memory[T.base + 0 * 3 + 1] == 1);  // (0,1)
    CHECK(tr.final_memory[T.base + 1 * 3 + 0] == 1);  // (1,0)
    CHECK(tr.final_memory[T.base + 1 * 3 + 1] == 0);

    CHECK_THROWS_AS(
        parse_program("int i width 2\narray2 T[1][2] symmetric\nbit w\nreturn\n"),
        Error);
}

TEST_CASE("input families fold constant indices into names") {
    BasicProgram bp = parse_program(
        "input x[4]\n"
        "bit w\n"
        "w = x[0] | x[1] | x[2] | x[3]\n"
        "return\n");
    CHECK(bp.table.input_slots.size() == 4);
    CHECK(bp.stmts[0].op == Stmt::Op::OrK);
    CHECK(bp.stmts[0].ops.size() == 4);
    for (std::uint64_t m = 0; m < 16; ++m) {
        Trace tr = interpret(bp, bits_of(m, 4), 2);
        CHECK(tr.w == (m ? 1 : 0));
    }
}

TEST_CASE("operator grammar stays single-level") {
    CHECK_THROWS_AS(parse_program("bit a b c w\nw = a & b | c\nreturn\n"),
                    Error);
    CHECK_THROWS_AS(parse_program("bit a b c w\nw = a | b & c\nreturn\n"),
                    Error);
    CHECK_THROWS_AS(parse_program("bit a b c w\nw = a ^ b ^ c\nreturn\n"),
                    Error);
    CHECK_NOTHROW(parse_program("bit a b c w\nw = a | b | c\nreturn\n"));
    CHECK_THROWS_AS(parse_program("bit a w\nw = 2\nreturn\n"), Error);
}

TEST_CASE("declaration and label errors are reported") {
    CHECK_THROWS_AS(parse_program("bit w w\nreturn\n"), Error);
    CHECK_THROWS_AS(parse_program("bit w\ngo to 9\nreturn\n"), Error);
    CHECK_THROWS_AS(parse_program("bit w\n5: w = 1\n5: return\n"), Error);
    CHECK_THROWS_AS(parse_program("bit a\nreturn\n"), Error);  // no w
    CHECK_THROWS_AS(
        parse_program("int a width 2\nint b width 3\nbit w\nreturn\n"), Error);
    CHECK_THROWS_AS(parse_program("bit w\nendwhile\nreturn\n"), Error);
    CHECK_THROWS_AS(parse_program("bit w\nwhile w\nreturn\n"), Error);
    CHECK_THROWS_AS(parse_program("bit w\nw = q\nreturn\n"), Error);
    CHECK_THROWS_AS(parse_program("bit w\nw = 1\ninput a\nreturn\n"), Error);
}

TEST_CASE("goto spellings and statement text survive") {
    BasicProgram bp = parse_program(
        "bit w\n"
        "goto 7\n"
        "w = 1\n"
        "7: return\n");
    CHECK(bp.stmts[0].op == Stmt::Op::Goto);
    CHECK(bp.stmts[0].target == 3);
    CHECK(bp.stmts[0].text.find("goto") != std::string::npos);

    nlohmann::json j = program_to_json(bp);
    CHECK(j["q"] == 1);
    CHECK(j["stmts"].size() == 3);
    CHECK(j["stmts"][0]["op"] == "goto");
    CHECK(j["stmts"][0]["target"] == 3);
}

TEST_CASE("write sets cover scratch blocks") {
    BasicProgram bp = parse_program(
        "input s\n"
        "int i width 2\n"
        "array R[3]\n"
        "bit w\n"
        "inc i\n"
        "R[i] = s\n"
        "w = R[i]\n"
        "return\n");
    const Stmt& inc = bp.stmts[0];
    auto ws = write_set(inc);
    CHECK(ws.size() == 4);  // two value bits + two carries
    const Stmt& wr = bp.stmts[1];
    auto wws = write_set(wr);
    CHECK(wws.size() == 8);  // four elements + four selectors
    const Stmt& rd = bp.stmts[2];
    auto rws = write_set(rd);
    CHECK(rws.size() == 5);  // destination + four selectors
    const Stmt& ret = bp.stmts[3];
    CHECK(write_set(ret).empty());
}
