#pragma once

// The register-machine pseudocode frontend: parser, sugar expansion, slot
// layout, and the reference interpreter that later serves as the oracle for
// compiled systems.
//
// Memory is a flat vector of bit slots.  Declared bits, integer bit-blocks
// (least significant bit first), arrays (row-major), and the per-statement
// scratch blocks (increment carries, equality temporaries, array selectors)
// all live there, so an interpreter trace aligns slot-for-slot with the
// compiled system's variable layout.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wefc/rat.hpp"

namespace wefc {

struct IntDecl {
    int base = -1;
    int width = 0;
};

struct ArrDecl {
    int base = -1;
    int rows = 0;  // element count (first dimension)
    int cols = 1;  // second dimension; 1 for 1-D
    bool twod = false;
    bool symmetric = false;
};

struct SymbolTable {
    int W = 0;  // word size; 0 until an integer is declared
    int q = 0;  // total slot count
    std::vector<std::string> slot_name;
    std::map<std::string, int> bits;
    std::map<std::string, IntDecl> ints;
    std::map<std::string, ArrDecl> arrays;
    std::vector<int> input_slots;
    std::vector<std::string> input_names;
    int w_slot = -1;

    int add_slot(const std::string& nm) {
        slot_name.push_back(nm);
        return q++;
    }

    void check_fresh(const std::string& nm) const {
        if (bits.count(nm) || ints.count(nm) || arrays.count(nm))
            throw Error("duplicate declaration of '" + nm + "'");
    }
};

// One basic statement, fields resolved to slots.  Unused fields stay -1.
struct Stmt {
    enum class Op {
        Const,    // dst = a (a is 0 or 1)
        Copy,     // dst = slot a
        Not,      // dst = !a
        Xor,      // dst = a ^ b
        And,      // dst = a & b
        Or,       // dst = a | b
        OrK,      // dst = ops[0] | ops[1] | ...
        Inc,      // integer at int_base, carries at carry_base
        EqTest,   // dst = (int ia_base == int ib_base), scratch at scratch_base
        ARead1,   // dst = arr[idx]
        AWrite1,  // arr[idx] = src
        ARead2,   // dst = arr[idx][idx2]
        AWrite2,  // arr[idx][idx2] = src
        Goto,     // target
        IfGoto,   // if cond then target
        Return,
    };
    Op op = Op::Return;
    int dst = -1;
    int a = -1, b = -1;
    std::vector<int> ops;
    int int_base = -1, int_w = 0, carry_base = -1;
    int ia_base = -1, ib_base = -1, scratch_base = -1;
    int arr_base = -1, arr_rows = 0, arr_cols = 1;
    int idx_base = -1, idx2_base = -1;
    int selM_base = -1, selN_base = -1;
    int src = -1;
    int target = -1;
    int cond = -1;
    int src_line = 0;  // source line for diagnostics
    std::string text;
};

struct BasicProgram {
    SymbolTable table;
    std::vector<Stmt> stmts;  // line i is stmts[i-1]

    int l() const { return static_cast<int>(stmts.size()); }
};

// Slots a statement writes at its time step.  Array writes cover the whole
// array (untouched elements are held by the selector-guarded copy rows, not
// by plain copies); array reads leave the array to the copy rows.
inline std::vector<int> write_set(const Stmt& s) {
    std::vector<int> w;
    auto block = [&](int base, int len) {
        for (int k = 0; k < len; ++k) w.push_back(base + k);
    };
    switch (s.op) {
        case Stmt::Op::Const:
        case Stmt::Op::Copy:
        case Stmt::Op::Not:
        case Stmt::Op::Xor:
        case Stmt::Op::And:
        case Stmt::Op::Or:
        case Stmt::Op::OrK:
            w.push_back(s.dst);
            break;
        case Stmt::Op::Inc:
            block(s.int_base, s.int_w);
            block(s.carry_base, s.int_w);
            break;
        case Stmt::Op::EqTest:
            block(s.scratch_base, s.int_w);
            w.push_back(s.dst);
            break;
        case Stmt::Op::ARead1:
            w.push_back(s.dst);
            block(s.selM_base, s.arr_rows);
            break;
        case Stmt::Op::AWrite1:
            block(s.arr_base, s.arr_rows);
            block(s.selM_base, s.arr_rows);
            break;
        case Stmt::Op::ARead2:
            w.push_back(s.dst);
            block(s.selM_base, s.arr_rows);
            block(s.selN_base, s.arr_cols);
            break;
        case Stmt::Op::AWrite2:
            block(s.arr_base, s.arr_rows * s.arr_cols);
            block(s.selM_base, s.arr_rows);
            block(s.selN_base, s.arr_cols);
            break;
        case Stmt::Op::Goto:
        case Stmt::Op::IfGoto:
        case Stmt::Op::Return:
            break;
    }
    return w;
}

// --------------------------------------------------------------------------
// Surface syntax.
//
//   input a b c          input x[4]            (bit parameters)
//   bit y w              bits y w              (plain bits)
//   int i width 3                              (W-bit integer, LSB first)
//   array R[u]                                 (indices 0..u)
//   array2 T[u][v]       array2 S[u][u] symmetric
//
//   b = 0 | 1 | x | !x | x & y | x ^ y | x | y | ...   (one operator)
//   b = i == j           inc i
//   x = R[m]   R[m] = x   x = T[m][c]   T[m][c] = x    (indices: int vars)
//   go to NN   goto NN    if c then go to NN endif     return
//   NN: statement                                      (numeric label)
//   while c [== 1] ... endwhile
//   for i in 0..K ... endfor                           (inclusive range)

namespace plang {

struct Token {
    enum class K { Ident, Number, Sym, End };
    K kind = K::End;
    std::string s;
    long num = 0;
};

inline std::vector<Token> lex_line(const std::string& line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& m) {
        throw Error("line " + std::to_string(lineno) + ": " + m);
    };
    while (i < line.size()) {
        char ch = line[i];
        if (ch == '#') break;
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < line.size() &&
                   (std::isalnum(static_cast<unsigned char>(line[j])) ||
                    line[j] == '_'))
                ++j;
            out.push_back({Token::K::Ident, line.substr(i, j - i), 0});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i;
            while (j < line.size() &&
                   std::isdigit(static_cast<unsigned char>(line[j])))
                ++j;
            Token t{Token::K::Number, line.substr(i, j - i), 0};
            t.num = std::stol(t.s);
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        if (ch == '=' && i + 1 < line.size() && line[i + 1] == '=') {
            out.push_back({Token::K::Sym, "==", 0});
            i += 2;
            continue;
        }
        if (ch == '.' && i + 1 < line.size() && line[i + 1] == '.') {
            out.push_back({Token::K::Sym, "..", 0});
            i += 2;
            continue;
        }
        if (std::string("[]()=!&|^:").find(ch) != std::string::npos) {
            out.push_back({Token::K::Sym, std::string(1, ch), 0});
            ++i;
            continue;
        }
        fail(std::string("unexpected character '") + ch + "'");
    }
    out.push_back({Token::K::End, "", 0});
    return out;
}

// Parsed statement before slot resolution and sugar expansion.
struct Raw {
    enum class K {
        Stmt,      // one surface statement (fields below)
        WhileBeg,  // while cond
        WhileEnd,
        ForBeg,  // for var in 0..hi
        ForEnd,
    };
    K k = K::Stmt;
    int label = -1;  // numeric label on this line, -1 if none
    int lineno = 0;
    std::string text;

    // For K::Stmt: a little sub-kind plus operand strings.
    enum class S {
        Const, Copy, Not, Xor, And, Or, OrK, Inc, EqTest,
        ARead, AWrite, Goto, IfGoto, Return,
    };
    S s = S::Return;
    std::string dst, a, b;          // names; for Const, a is "0"/"1"
    std::vector<std::string> ops;   // OrK operands
    std::string idx, idx2;          // array index variable names
    int target = 0;                 // label number for jumps
    std::string cond;               // IfGoto / while condition
    std::string var;                // for-loop variable
    long hi = 0;                    // for-loop upper bound
};

struct Decl {
    enum class K { Input, InputFam, Bit, Int, Arr1, Arr2 };
    K k;
    std::vector<std::string> names;
    long n1 = 0, n2 = 0;
    bool symmetric = false;
    int lineno = 0;
};

struct Program {
    std::vector<Decl> decls;
    std::vector<Raw> items;
};

inline Program parse(const std::string& text) {
    Program prog;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool in_decls = true;
    while (std::getline(is, line)) {
        ++lineno;
        std::vector<Token> ts = lex_line(line, lineno);
        if (ts[0].kind == Token::K::End) continue;
        std::size_t p = 0;
        auto fail = [&](const std::string& m) {
            throw Error("line " + std::to_string(lineno) + ": " + m);
        };
        auto at = [&](std::size_t k) -> const Token& {
            return ts[std::min(k, ts.size() - 1)];
        };
        auto is_sym = [&](std::size_t k, const char* s) {
            return at(k).kind == Token::K::Sym && at(k).s == s;
        };
        auto is_kw = [&](std::size_t k, const char* s) {
            return at(k).kind == Token::K::Ident && at(k).s == s;
        };
        auto want_ident = [&](const char* what) {
            if (at(p).kind != Token::K::Ident)
                fail(std::string("expected ") + what);
            return ts[p++].s;
        };
        auto want_number = [&](const char* what) {
            if (at(p).kind != Token::K::Number)
                fail(std::string("expected ") + what);
            return ts[p++].num;
        };
        auto want_sym = [&](const char* s) {
            if (!is_sym(p, s)) fail(std::string("expected '") + s + "'");
            ++p;
        };
        auto want_end = [&] {
            if (at(p).kind != Token::K::End) fail("trailing tokens");
        };
        // A name, with a constant index folded in ("x[3]" names a family bit).
        auto read_operand = [&]() {
            std::string nm = want_ident("operand");
            if (is_sym(p, "[") && at(p + 1).kind == Token::K::Number &&
                is_sym(p + 2, "]")) {
                nm += "[" + at(p + 1).s + "]";
                p += 3;
            }
            return nm;
        };

        // Declarations come first.
        if (in_decls && at(0).kind == Token::K::Ident) {
            const std::string& kw = at(0).s;
            if (kw == "input" || kw == "bit" || kw == "bits" || kw == "int" ||
                kw == "array" || kw == "array2") {
                Decl d;
                d.lineno = lineno;
                p = 1;
                if (kw == "input") {
                    if (at(1).kind == Token::K::Ident && is_sym(2, "[")) {
                        d.k = Decl::K::InputFam;
                        d.names.push_back(want_ident("name"));
                        want_sym("[");
                        d.n1 = want_number("count");
                        want_sym("]");
                        want_end();
                    } else {
                        d.k = Decl::K::Input;
                        while (at(p).kind == Token::K::Ident)
                            d.names.push_back(ts[p++].s);
                        if (d.names.empty()) fail("input needs names");
                        want_end();
                    }
                } else if (kw == "bit" || kw == "bits") {
                    d.k = Decl::K::Bit;
                    while (at(p).kind == Token::K::Ident)
                        d.names.push_back(ts[p++].s);
                    if (d.names.empty()) fail("bit needs names");
                    want_end();
                } else if (kw == "int") {
                    d.k = Decl::K::Int;
                    d.names.push_back(want_ident("name"));
                    if (!is_kw(p, "width")) fail("expected 'width'");
                    ++p;
                    d.n1 = want_number("width");
                    want_end();
                } else if (kw == "array") {
                    d.k = Decl::K::Arr1;
                    d.names.push_back(want_ident("name"));
                    want_sym("[");
                    d.n1 = want_number("max index");
                    want_sym("]");
                    want_end();
                } else {
                    d.k = Decl::K::Arr2;
                    d.names.push_back(want_ident("name"));
                    want_sym("[");
                    d.n1 = want_number("max index");
                    want_sym("]");
                    want_sym("[");
                    d.n2 = want_number("max index");
                    want_sym("]");
                    if (is_kw(p, "symmetric")) {
                        d.symmetric = true;
                        ++p;
                    }
                    want_end();
                }
                prog.decls.push_back(std::move(d));
                continue;
            }
        }
        in_decls = false;

        Raw r;
        r.lineno = lineno;
        r.text = line;
        if (at(0).kind == Token::K::Number && is_sym(1, ":")) {
            r.label = static_cast<int>(at(0).num);
            p = 2;
        }

        auto read_jump_target = [&]() {
            if (is_kw(p, "goto")) {
                ++p;
            } else if (is_kw(p, "go") && is_kw(p + 1, "to")) {
                p += 2;
            } else {
                fail("expected 'go to'");
            }
            return static_cast<int>(want_number("label number"));
        };

        if (is_kw(p, "return")) {
            ++p;
            want_end();
            r.s = Raw::S::Return;
        } else if (is_kw(p, "goto") || (is_kw(p, "go") && is_kw(p + 1, "to"))) {
            r.target = read_jump_target();
            want_end();
            r.s = Raw::S::Goto;
        } else if (is_kw(p, "if")) {
            ++p;
            r.cond = read_operand();
            if (is_kw(p, "then"))
                ++p;
            else
                fail("expected 'then'");
            r.target = read_jump_target();
            if (!is_kw(p, "endif")) fail("expected 'endif'");
            ++p;
            want_end();
            r.s = Raw::S::IfGoto;
        } else if (is_kw(p, "inc")) {
            ++p;
            r.dst = want_ident("integer name");
            want_end();
            r.s = Raw::S::Inc;
        } else if (is_kw(p, "while")) {
            ++p;
            r.cond = read_operand();
            if (is_sym(p, "==")) {
                ++p;
                if (want_number("1") != 1) fail("only '== 1' conditions");
            }
            want_end();
            r.k = Raw::K::WhileBeg;
        } else if (is_kw(p, "endwhile")) {
            ++p;
            want_end();
            r.k = Raw::K::WhileEnd;
        } else if (is_kw(p, "for")) {
            ++p;
            r.var = want_ident("loop variable");
            if (!is_kw(p, "in")) fail("expected 'in'");
            ++p;
            if (want_number("0") != 0) fail("for loops start at 0");
            want_sym("..");
            r.hi = want_number("upper bound");
            want_end();
            r.k = Raw::K::ForBeg;
        } else if (is_kw(p, "endfor")) {
            ++p;
            want_end();
            r.k = Raw::K::ForEnd;
        } else {
            // Assignment forms.  Left side: name, name[ivar], name[ivar][ivar],
            // or a family bit name[number].
            std::string base = want_ident("statement");
            bool lhs_indexed = false;
            if (is_sym(p, "[")) {
                ++p;
                lhs_indexed = true;
                if (at(p).kind == Token::K::Number) {
                    // family bit like x[3]: fold into the name
                    base += "[" + ts[p++].s + "]";
                    want_sym("]");
                    lhs_indexed = false;
                } else {
                    r.idx = want_ident("index variable");
                    want_sym("]");
                    if (is_sym(p, "[")) {
                        ++p;
                        r.idx2 = want_ident("index variable");
                        want_sym("]");
                    }
                }
            }
            r.dst = base;
            want_sym("=");
            if (lhs_indexed) {
                r.s = Raw::S::AWrite;
                r.a = read_operand();
                want_end();
            } else {
                bool paren = false;
                if (is_sym(p, "(")) {
                    paren = true;
                    ++p;
                }
                if (at(p).kind == Token::K::Number) {
                    long v = want_number("0 or 1");
                    if (paren) want_sym(")");
                    want_end();
                    if (v != 0 && v != 1) fail("bit constants are 0 or 1");
                    r.s = Raw::S::Const;
                    r.a = std::to_string(v);
                } else if (is_sym(p, "!")) {
                    ++p;
                    r.a = read_operand();
                    if (paren) want_sym(")");
                    want_end();
                    r.s = Raw::S::Not;
                } else {
                    std::string first = read_operand();
                    if (is_sym(p, "[")) {
                        ++p;
                        r.s = Raw::S::ARead;
                        r.a = first;
                        r.idx = want_ident("index variable");
                        want_sym("]");
                        if (is_sym(p, "[")) {
                            ++p;
                            r.idx2 = want_ident("index variable");
                            want_sym("]");
                        }
                        if (paren) want_sym(")");
                        want_end();
                    } else if (is_sym(p, "==")) {
                        ++p;
                        r.s = Raw::S::EqTest;
                        r.a = first;
                        r.b = want_ident("operand");
                        if (paren) want_sym(")");
                        want_end();
                    } else if (is_sym(p, "&") || is_sym(p, "^")) {
                        bool xo = at(p).s == "^";
                        ++p;
                        r.s = xo ? Raw::S::Xor : Raw::S::And;
                        r.a = first;
                        r.b = read_operand();
                        if (paren) want_sym(")");
                        want_end();
                    } else if (is_sym(p, "|")) {
                        r.ops.push_back(first);
                        while (is_sym(p, "|")) {
                            ++p;
                            r.ops.push_back(read_operand());
                        }
                        if (paren) want_sym(")");
                        want_end();
                        if (r.ops.size() == 2) {
                            r.s = Raw::S::Or;
                            r.a = r.ops[0];
                            r.b = r.ops[1];
                            r.ops.clear();
                        } else {
                            r.s = Raw::S::OrK;
                        }
                    } else {
                        if (paren) want_sym(")");
                        want_end();
                        r.s = Raw::S::Copy;
                        r.a = first;
                    }
                }
            }
        }
        prog.items.push_back(std::move(r));
    }
    return prog;
}

}  // namespace plang

// --------------------------------------------------------------------------
// Sugar expansion + slot resolution.  fallback_W supplies the word size for
// loop scratch integers when the program declares no integer of its own.

inline BasicProgram desugar(const plang::Program& prog, int fallback_W = 0) {
    BasicProgram bp;
    SymbolTable& tb = bp.table;

    for (const auto& d : prog.decls) {
        auto fail = [&](const std::string& m) {
            throw Error("line " + std::to_string(d.lineno) + ": " + m);
        };
        switch (d.k) {
            case plang::Decl::K::Input:
                for (const auto& nm : d.names) {
                    tb.check_fresh(nm);
                    int s = tb.add_slot(nm);
                    tb.bits[nm] = s;
                    tb.input_slots.push_back(s);
                    tb.input_names.push_back(nm);
                }
                break;
            case plang::Decl::K::InputFam:
                for (long i = 0; i < d.n1; ++i) {
                    std::string nm = d.names[0] + "[" + std::to_string(i) + "]";
                    tb.check_fresh(nm);
                    int s = tb.add_slot(nm);
                    tb.bits[nm] = s;
                    tb.input_slots.push_back(s);
                    tb.input_names.push_back(nm);
                }
                break;
            case plang::Decl::K::Bit:
                for (const auto& nm : d.names) {
                    tb.check_fresh(nm);
                    tb.bits[nm] = tb.add_slot(nm);
                }
                break;
            case plang::Decl::K::Int: {
                const std::string& nm = d.names[0];
                tb.check_fresh(nm);
                if (d.n1 < 1) fail("integer width must be positive");
                if (tb.W && tb.W != d.n1)
                    fail("all integers share one width; saw " +
                         std::to_string(d.n1) + " after " + std::to_string(tb.W));
                tb.W = static_cast<int>(d.n1);
                IntDecl iv;
                iv.width = tb.W;
                iv.base = tb.q;
                for (int j = 1; j <= tb.W; ++j)
                    tb.add_slot(nm + ".bit" + std::to_string(j));
                tb.ints[nm] = iv;
                break;
            }
            case plang::Decl::K::Arr1:
            case plang::Decl::K::Arr2: {
                const std::string& nm = d.names[0];
                tb.check_fresh(nm);
                ArrDecl av;
                av.twod = (d.k == plang::Decl::K::Arr2);
                av.rows = static_cast<int>(d.n1) + 1;
                av.cols = av.twod ? static_cast<int>(d.n2) + 1 : 1;
                av.symmetric = d.symmetric;
                if (av.symmetric && av.rows != av.cols)
                    fail("symmetric arrays must be square");
                av.base = tb.q;
                for (int r = 0; r < av.rows; ++r)
                    for (int c = 0; c < av.cols; ++c)
                        tb.add_slot(nm + "[" + std::to_string(r) + "]" +
                                    (av.twod ? "[" + std::to_string(c) + "]"
                                             : ""));
                tb.arrays[nm] = av;
                break;
            }
        }
    }

    auto word_size = [&]() -> int {
        if (tb.W) return tb.W;
        if (fallback_W > 0) return fallback_W;
        throw Error("loop sugar needs an integer width: declare an int or "
                    "pass a word size");
    };

    // Emission machinery: statements plus jump fixups resolved at the end.
    struct Fixup {
        std::size_t stmt;
        int surface_label;  // -1 when internal
        int internal_id;
    };
    std::vector<Fixup> fixups;
    std::map<int, int> surface_line;         // label -> 1-based line
    std::map<int, int> internal_line;        // internal id -> 1-based line
    std::vector<int> pending_internal;       // labels waiting for next stmt
    int next_internal = 0;
    int pending_surface = -1;

    auto emit = [&](Stmt s, int lineno, const std::string& text) {
        s.src_line = lineno;
        s.text = text;
        bp.stmts.push_back(std::move(s));
        int line = bp.l();
        if (pending_surface >= 0) {
            if (surface_line.count(pending_surface))
                throw Error("duplicate label " + std::to_string(pending_surface));
            surface_line[pending_surface] = line;
            pending_surface = -1;
        }
        for (int id : pending_internal) internal_line[id] = line;
        pending_internal.clear();
        return line;
    };

    auto lookup_bit = [&](const std::string& nm, int lineno) {
        auto it = tb.bits.find(nm);
        if (it == tb.bits.end())
            throw Error("line " + std::to_string(lineno) + ": '" + nm +
                        "' is not a declared bit");
        return it->second;
    };
    auto lookup_int = [&](const std::string& nm, int lineno) -> const IntDecl& {
        auto it = tb.ints.find(nm);
        if (it == tb.ints.end())
            throw Error("line " + std::to_string(lineno) + ": '" + nm +
                        "' is not a declared integer");
        return it->second;
    };

    // Scratch allocators.  Blocks are appended to the slot tape in emission
    // order, which keeps the layout deterministic.
    auto fresh_carry = [&](int lineno) {
        int base = tb.q;
        int W = word_size();
        for (int j = 1; j <= W; ++j)
            tb.add_slot("carry.L" + std::to_string(lineno) + ".bit" +
                        std::to_string(j));
        return base;
    };
    auto fresh_eq_scratch = [&](int lineno) {
        int base = tb.q;
        int W = word_size();
        for (int j = 1; j <= W; ++j)
            tb.add_slot("eq.L" + std::to_string(lineno) + ".bit" +
                        std::to_string(j));
        return base;
    };
    auto fresh_sel = [&](int lineno, char which, int len) {
        int base = tb.q;
        for (int j = 0; j < len; ++j)
            tb.add_slot(std::string(1, which) + ".L" + std::to_string(lineno) +
                        "[" + std::to_string(j) + "]");
        return base;
    };

    // Scratch is keyed by the emitted line number, which is only known at
    // emit time; allocate right before emitting.
    std::function<void(const std::vector<plang::Raw>&, std::size_t, std::size_t)>
        emit_range = [&](const std::vector<plang::Raw>& items, std::size_t lo,
                         std::size_t hi) {
            for (std::size_t ix = lo; ix < hi; ++ix) {
                const plang::Raw& r = items[ix];
                if (r.label >= 0) {
                    if (pending_surface >= 0)
                        throw Error("line " + std::to_string(r.lineno) +
                                    ": two labels on one statement");
                    pending_surface = r.label;
                }
                switch (r.k) {
                    case plang::Raw::K::Stmt:
                        break;
                    case plang::Raw::K::WhileBeg: {
                        // top: if c go to body; go to end; body: ...; go to
                        // top; end:
                        std::size_t body = ix + 1, depth = 1, end = body;
                        while (end < hi) {
                            if (items[end].k == plang::Raw::K::WhileBeg) ++depth;
                            if (items[end].k == plang::Raw::K::WhileEnd &&
                                --depth == 0)
                                break;
                            ++end;
                        }
                        if (end >= hi)
                            throw Error("line " + std::to_string(r.lineno) +
                                        ": while without endwhile");
                        int id_top = next_internal++;
                        int id_body = next_internal++;
                        int id_end = next_internal++;
                        pending_internal.push_back(id_top);
                        Stmt s;
                        s.op = Stmt::Op::IfGoto;
                        s.cond = lookup_bit(r.cond, r.lineno);
                        std::size_t at = bp.stmts.size();
                        emit(s, r.lineno, "while " + r.cond);
                        fixups.push_back({at, -1, id_body});
                        Stmt g;
                        g.op = Stmt::Op::Goto;
                        at = bp.stmts.size();
                        emit(g, r.lineno, "while-exit");
                        fixups.push_back({at, -1, id_end});
                        pending_internal.push_back(id_body);
                        emit_range(items, body, end);
                        Stmt back;
                        back.op = Stmt::Op::Goto;
                        at = bp.stmts.size();
                        emit(back, items[end].lineno, "endwhile");
                        fixups.push_back({at, -1, id_top});
                        pending_internal.push_back(id_end);
                        ix = end;
                        continue;
                    }
                    case plang::Raw::K::ForBeg: {
                        std::size_t body = ix + 1, depth = 1, end = body;
                        while (end < hi) {
                            if (items[end].k == plang::Raw::K::ForBeg) ++depth;
                            if (items[end].k == plang::Raw::K::ForEnd &&
                                --depth == 0)
                                break;
                            ++end;
                        }
                        if (end >= hi)
                            throw Error("line " + std::to_string(r.lineno) +
                                        ": for without endfor");
                        int W = word_size();
                        if (!tb.W) tb.W = W;
                        if (r.hi > (1L << W) - 1)
                            throw Error("line " + std::to_string(r.lineno) +
                                        ": loop bound exceeds the word size");
                        const IntDecl& ctr = lookup_int(r.var, r.lineno);
                        // Hidden limit integer, preloaded by r.hi increments.
                        std::string lim_nm =
                            "lim.L" + std::to_string(r.lineno);
                        IntDecl lim;
                        lim.width = W;
                        lim.base = tb.q;
                        for (int j = 1; j <= W; ++j)
                            tb.add_slot(lim_nm + ".bit" + std::to_string(j));
                        tb.ints[lim_nm] = lim;
                        std::string fl_nm = "hit.L" + std::to_string(r.lineno);
                        int flag = tb.add_slot(fl_nm);
                        tb.bits[fl_nm] = flag;
                        for (long k = 0; k < r.hi; ++k) {
                            Stmt inc;
                            inc.op = Stmt::Op::Inc;
                            inc.int_base = lim.base;
                            inc.int_w = W;
                            inc.carry_base = fresh_carry(r.lineno);
                            emit(inc, r.lineno, "for-preload inc " + lim_nm);
                        }
                        int id_top = next_internal++;
                        int id_end = next_internal++;
                        pending_internal.push_back(id_top);
                        emit_range(items, body, end);
                        Stmt eq;
                        eq.op = Stmt::Op::EqTest;
                        eq.dst = flag;
                        eq.ia_base = ctr.base;
                        eq.ib_base = lim.base;
                        eq.int_w = W;
                        eq.scratch_base = fresh_eq_scratch(r.lineno);
                        emit(eq, items[end].lineno,
                             fl_nm + " = " + r.var + " == " + lim_nm);
                        Stmt br;
                        br.op = Stmt::Op::IfGoto;
                        br.cond = flag;
                        std::size_t at = bp.stmts.size();
                        emit(br, items[end].lineno, "for-exit test");
                        fixups.push_back({at, -1, id_end});
                        Stmt inc;
                        inc.op = Stmt::Op::Inc;
                        inc.int_base = ctr.base;
                        inc.int_w = W;
                        inc.carry_base = fresh_carry(items[end].lineno);
                        emit(inc, items[end].lineno, "inc " + r.var);
                        Stmt back;
                        back.op = Stmt::Op::Goto;
                        at = bp.stmts.size();
                        emit(back, items[end].lineno, "endfor");
                        fixups.push_back({at, -1, id_top});
                        pending_internal.push_back(id_end);
                        ix = end;
                        continue;
                    }
                    case plang::Raw::K::WhileEnd:
                        throw Error("line " + std::to_string(r.lineno) +
                                    ": endwhile without while");
                    case plang::Raw::K::ForEnd:
                        throw Error("line " + std::to_string(r.lineno) +
                                    ": endfor without for");
                }

                Stmt s;
                auto arr_of = [&](const std::string& nm) -> const ArrDecl& {
                    auto it = tb.arrays.find(nm);
                    if (it == tb.arrays.end())
                        throw Error("line " + std::to_string(r.lineno) + ": '" +
                                    nm + "' is not a declared array");
                    return it->second;
                };
                switch (r.s) {
                    case plang::Raw::S::Const:
                        s.op = Stmt::Op::Const;
                        s.dst = lookup_bit(r.dst, r.lineno);
                        s.a = (r.a == "1");
                        break;
                    case plang::Raw::S::Copy:
                        s.op = Stmt::Op::Copy;
                        s.dst = lookup_bit(r.dst, r.lineno);
                        s.a = lookup_bit(r.a, r.lineno);
                        break;
                    case plang::Raw::S::Not:
                        s.op = Stmt::Op::Not;
                        s.dst = lookup_bit(r.dst, r.lineno);
                        s.a = lookup_bit(r.a, r.lineno);
                        break;
                    case plang::Raw::S::Xor:
                    case plang::Raw::S::And:
                    case plang::Raw::S::Or:
                        s.op = r.s == plang::Raw::S::Xor  ? Stmt::Op::Xor
                               : r.s == plang::Raw::S::And ? Stmt::Op::And
                                                           : Stmt::Op::Or;
                        s.dst = lookup_bit(r.dst, r.lineno);
                        s.a = lookup_bit(r.a, r.lineno);
                        s.b = lookup_bit(r.b, r.lineno);
                        break;
                    case plang::Raw::S::OrK:
                        s.op = Stmt::Op::OrK;
                        s.dst = lookup_bit(r.dst, r.lineno);
                        for (const auto& nm : r.ops)
                            s.ops.push_back(lookup_bit(nm, r.lineno));
                        break;
                    case plang::Raw::S::Inc: {
                        const IntDecl& iv = lookup_int(r.dst, r.lineno);
                        s.op = Stmt::Op::Inc;
                        s.int_base = iv.base;
                        s.int_w = iv.width;
                        s.carry_base = fresh_carry(r.lineno);
                        break;
                    }
                    case plang::Raw::S::EqTest: {
                        const IntDecl& ia = lookup_int(r.a, r.lineno);
                        const IntDecl& ib = lookup_int(r.b, r.lineno);
                        s.op = Stmt::Op::EqTest;
                        s.dst = lookup_bit(r.dst, r.lineno);
                        s.ia_base = ia.base;
                        s.ib_base = ib.base;
                        s.int_w = ia.width;
                        s.scratch_base = fresh_eq_scratch(r.lineno);
                        break;
                    }
                    case plang::Raw::S::ARead: {
                        const ArrDecl& av = arr_of(r.a);
                        s.dst = lookup_bit(r.dst, r.lineno);
                        s.arr_base = av.base;
                        s.arr_rows = av.rows;
                        s.arr_cols = av.cols;
                        s.int_w = tb.W;
                        s.idx_base = lookup_int(r.idx, r.lineno).base;
                        if (av.twod != !r.idx2.empty())
                            throw Error("line " + std::to_string(r.lineno) +
                                        ": wrong number of indices for " + r.a);
                        if (av.twod) {
                            s.op = Stmt::Op::ARead2;
                            s.idx2_base = lookup_int(r.idx2, r.lineno).base;
                            s.selM_base = fresh_sel(r.lineno, 'M', av.rows);
                            s.selN_base = fresh_sel(r.lineno, 'N', av.cols);
                        } else {
                            s.op = Stmt::Op::ARead1;
                            s.selM_base = fresh_sel(r.lineno, 'M', av.rows);
                        }
                        break;
                    }
                    case plang::Raw::S::AWrite: {
                        const ArrDecl& av = arr_of(r.dst);
                        s.src = lookup_bit(r.a, r.lineno);
                        s.arr_base = av.base;
                        s.arr_rows = av.rows;
                        s.arr_cols = av.cols;
                        s.int_w = tb.W;
                        s.idx_base = lookup_int(r.idx, r.lineno).base;
                        if (av.twod != !r.idx2.empty())
                            throw Error("line " + std::to_string(r.lineno) +
                                        ": wrong number of indices for " +
                                        r.dst);
                        if (av.twod) {
                            s.op = Stmt::Op::AWrite2;
                            s.idx2_base = lookup_int(r.idx2, r.lineno).base;
                            s.selM_base = fresh_sel(r.lineno, 'M', av.rows);
                            s.selN_base = fresh_sel(r.lineno, 'N', av.cols);
                            if (av.symmetric) {
                                // Mirror write; emitted as a second statement.
                                emit(s, r.lineno, r.text);
                                Stmt mirror = s;
                                std::swap(mirror.idx_base, mirror.idx2_base);
                                mirror.selM_base =
                                    fresh_sel(r.lineno, 'M', av.rows);
                                mirror.selN_base =
                                    fresh_sel(r.lineno, 'N', av.cols);
                                emit(mirror, r.lineno, r.text + " (mirror)");
                                continue;
                            }
                        } else {
                            s.op = Stmt::Op::AWrite1;
                            s.selM_base = fresh_sel(r.lineno, 'M', av.rows);
                        }
                        break;
                    }
                    case plang::Raw::S::Goto:
                        s.op = Stmt::Op::Goto;
                        break;
                    case plang::Raw::S::IfGoto:
                        s.op = Stmt::Op::IfGoto;
                        s.cond = lookup_bit(r.cond, r.lineno);
                        break;
                    case plang::Raw::S::Return:
                        s.op = Stmt::Op::Return;
                        break;
                }
                std::size_t at = bp.stmts.size();
                emit(s, r.lineno, r.text);
                if (r.s == plang::Raw::S::Goto || r.s == plang::Raw::S::IfGoto)
                    fixups.push_back({at, r.target, -1});
            }
        };

    emit_range(prog.items, 0, prog.items.size());
    if (pending_surface >= 0 || !pending_internal.empty())
        throw Error("label at end of program with no statement to attach to");

    for (const auto& f : fixups) {
        int line;
        if (f.surface_label >= 0) {
            auto it = surface_line.find(f.surface_label);
            if (it == surface_line.end())
                throw Error("line " + std::to_string(bp.stmts[f.stmt].src_line) +
                            ": unknown label " + std::to_string(f.surface_label));
            line = it->second;
        } else {
            line = internal_line.at(f.internal_id);
        }
        bp.stmts[f.stmt].target = line;
    }
    for (const auto& s : bp.stmts)
        if ((s.op == Stmt::Op::Goto || s.op == Stmt::Op::IfGoto) &&
            (s.target < 1 || s.target > bp.l()))
            throw Error("jump target out of range");

    if (!tb.bits.count("w"))
        throw Error("program must declare a bit named 'w'");
    tb.w_slot = tb.bits.at("w");

    // Array index range static check: an index variable spans [0, 2^W-1];
    // the declared length may not exceed the addressable range.
    for (const auto& [nm, av] : tb.arrays) {
        long cap = 1L << (tb.W ? tb.W : 30);
        if (av.rows > cap || av.cols > cap)
            throw Error("array " + nm + " is longer than the word size allows");
    }
    return bp;
}

inline BasicProgram parse_program(const std::string& text, int fallback_W = 0) {
    return desugar(plang::parse(text), fallback_W);
}

// --------------------------------------------------------------------------
// Reference interpreter.

struct Trace {
    int w = 0;
    int steps_used = 0;              // step at which the first Return ran
    std::vector<int> line_at;        // line_at[t], t in [1, p]; [0] unused
    std::vector<std::uint8_t> final_memory;
    std::vector<std::vector<std::uint8_t>> mem_at;  // memory after t steps
};

inline long int_value(const std::vector<std::uint8_t>& mem, int base, int w) {
    long v = 0;
    for (int j = w - 1; j >= 0; --j) v = (v << 1) | mem[base + j];
    return v;
}

inline Trace interpret(const BasicProgram& bp,
                       const std::vector<std::uint8_t>& input, int p_max) {
    const SymbolTable& tb = bp.table;
    if (input.size() != tb.input_slots.size())
        throw Error("input length mismatch: want " +
                    std::to_string(tb.input_slots.size()));
    if (p_max < bp.l())
        throw Error("step budget below program length");
    Trace tr;
    std::vector<std::uint8_t> mem(tb.q, 0);
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i] > 1) throw Error("inputs are bits");
        mem[tb.input_slots[i]] = input[i];
    }
    tr.mem_at.push_back(mem);
    tr.line_at.assign(p_max + 1, 0);
    int pc = 1;
    for (int t = 1; t <= p_max; ++t) {
        if (pc < 1 || pc > bp.l())
            throw Error("control fell outside the program at step " +
                        std::to_string(t));
        const Stmt& s = bp.stmts[pc - 1];
        tr.line_at[t] = pc;
        std::vector<std::uint8_t> next = mem;
        std::vector<int> touched;
        auto put = [&](int slot, int v) {
            internal_check(slot >= 0 && slot < tb.q, "write outside memory");
            next[slot] = static_cast<std::uint8_t>(v);
            touched.push_back(slot);
        };
        int next_pc = pc + 1;
        switch (s.op) {
            case Stmt::Op::Const:
                put(s.dst, s.a);
                break;
            case Stmt::Op::Copy:
                put(s.dst, mem[s.a]);
                break;
            case Stmt::Op::Not:
                put(s.dst, 1 - mem[s.a]);
                break;
            case Stmt::Op::Xor:
                put(s.dst, mem[s.a] ^ mem[s.b]);
                break;
            case Stmt::Op::And:
                put(s.dst, mem[s.a] & mem[s.b]);
                break;
            case Stmt::Op::Or:
                put(s.dst, mem[s.a] | mem[s.b]);
                break;
            case Stmt::Op::OrK: {
                int v = 0;
                for (int o : s.ops) v |= mem[o];
                put(s.dst, v);
                break;
            }
            case Stmt::Op::Inc: {
                int carry = mem[s.int_base];  // carry_1 = old bit 1
                put(s.carry_base, carry);
                put(s.int_base, 1 - mem[s.int_base]);
                for (int j = 2; j <= s.int_w; ++j) {
                    int bj = mem[s.int_base + j - 1];
                    put(s.int_base + j - 1, bj ^ carry);
                    carry = bj & carry;
                    put(s.carry_base + j - 1, carry);
                }
                break;
            }
            case Stmt::Op::EqTest: {
                int any = 0;
                for (int j = 0; j < s.int_w; ++j) {
                    int z = mem[s.ia_base + j] ^ mem[s.ib_base + j];
                    put(s.scratch_base + j, z);
                    any |= z;
                }
                put(s.dst, 1 - any);
                break;
            }
            case Stmt::Op::ARead1:
            case Stmt::Op::AWrite1: {
                long m = int_value(mem, s.idx_base, s.int_w ? s.int_w : tb.W);
                if (m >= s.arr_rows)
                    throw Error("array index " + std::to_string(m) +
                                " out of range at line " +
                                std::to_string(s.src_line));
                for (int j = 0; j < s.arr_rows; ++j)
                    put(s.selM_base + j, j == m ? 0 : 1);
                if (s.op == Stmt::Op::ARead1)
                    put(s.dst, mem[s.arr_base + m]);
                else
                    put(s.arr_base + m, mem[s.src]);
                break;
            }
            case Stmt::Op::ARead2:
            case Stmt::Op::AWrite2: {
                long m = int_value(mem, s.idx_base, tb.W);
                long c = int_value(mem, s.idx2_base, tb.W);
                if (m >= s.arr_rows || c >= s.arr_cols)
                    throw Error("array index (" + std::to_string(m) + "," +
                                std::to_string(c) + ") out of range at line " +
                                std::to_string(s.src_line));
                for (int j = 0; j < s.arr_rows; ++j)
                    put(s.selM_base + j, j == m ? 0 : 1);
                for (int j = 0; j < s.arr_cols; ++j)
                    put(s.selN_base + j, j == c ? 0 : 1);
                long r = m * s.arr_cols + c;
                if (s.op == Stmt::Op::ARead2)
                    put(s.dst, mem[s.arr_base + r]);
                else
                    put(s.arr_base + r, mem[s.src]);
                break;
            }
            case Stmt::Op::Goto:
                next_pc = s.target;
                break;
            case Stmt::Op::IfGoto:
                next_pc = mem[s.cond] ? s.target : pc + 1;
                break;
            case Stmt::Op::Return:
                next_pc = pc;
                if (!tr.steps_used) tr.steps_used = t;
                break;
        }
        // Disjointness: everything this step changed sits in the statement's
        // declared write set.
        {
            std::vector<int> ws = write_set(s);
            for (int slot : touched) {
                bool ok = false;
                for (int wslot : ws)
                    if (wslot == slot) {
                        ok = true;
                        break;
                    }
                internal_check(ok, "write outside the statement's slot set");
            }
        }
        mem = std::move(next);
        tr.mem_at.push_back(mem);
        pc = next_pc;
    }
    if (!tr.steps_used)
        throw Error("program did not return within " + std::to_string(p_max) +
                    " steps");
    tr.final_memory = mem;
    tr.w = mem[tb.w_slot];
    return tr;
}

// Machine-readable program dump for debugging.
inline nlohmann::json program_to_json(const BasicProgram& bp) {
    static const char* opname[] = {"const",  "copy",   "not",    "xor",
                                   "and",    "or",     "ork",    "inc",
                                   "eqtest", "aread1", "awrite1", "aread2",
                                   "awrite2", "goto",  "ifgoto", "return"};
    nlohmann::json j;
    j["q"] = bp.table.q;
    j["W"] = bp.table.W;
    j["inputs"] = bp.table.input_names;
    j["slots"] = bp.table.slot_name;
    j["stmts"] = nlohmann::json::array();
    for (const auto& s : bp.stmts) {
        nlohmann::json e;
        e["op"] = opname[static_cast<int>(s.op)];
        if (s.dst >= 0) e["dst"] = s.dst;
        if (s.a >= 0 || s.op == Stmt::Op::Const) e["a"] = s.a;
        if (s.b >= 0) e["b"] = s.b;
        if (!s.ops.empty()) e["ops"] = s.ops;
        if (s.target > 0) e["target"] = s.target;
        if (s.cond >= 0) e["cond"] = s.cond;
        if (s.src >= 0) e["src"] = s.src;
        e["text"] = s.text;
        j["stmts"].push_back(std::move(e));
    }
    return j;
}

}  // namespace wefc
