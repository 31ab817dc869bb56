#pragma once

// Translates a basic program into its explicit linear system over
//   B(slot, t)  for t in [0, p]   (memory bit at each step)
//   S(i, t)     for t in [1, p]   (line i executes at step t)
// all boxed to [0, 1].
//
// Constraint groups, tagged by the first token of each row label:
//   C      non-input memory is zero at t = 0 (equalities)
//   D      execution starts at line 1
//   E      exactly one line executes per step (equalities)
//   F(*)   control flow: successor line mass moves forward
//   G(*)   data flow: written slots follow the executing statement's
//          template, everything else is copied
//
// Every F/G row carries S(i,t) with coefficient +1 and becomes vacuous when
// S(i,t) = 0, so only the executing line constrains memory.

#include <string>
#include <vector>

#include "wefc/lp.hpp"
#include "wefc/pseudolang.hpp"
#include "wefc/wef.hpp"

namespace wefc {

// Canonical variable names: memory slots print as B(i,t) with 1-based slot i,
// integer blocks as I(k,j,t) with k the integer's rank and j the bit,
// increment carries as I(rL,j,t) for source line L, array selectors as
// M(j,t) / N(j,t) (line-qualified when several array statements exist).
inline std::vector<std::string> slot_name_stems(const BasicProgram& bp) {
    const SymbolTable& tb = bp.table;
    std::vector<std::string> stem(tb.q);
    for (int i = 0; i < tb.q; ++i) stem[i] = "B(" + std::to_string(i + 1);
    std::vector<const IntDecl*> ints;
    for (const auto& [nm, iv] : tb.ints) ints.push_back(&iv);
    std::sort(ints.begin(), ints.end(),
              [](const IntDecl* a, const IntDecl* b) { return a->base < b->base; });
    for (std::size_t k = 0; k < ints.size(); ++k)
        for (int j = 1; j <= ints[k]->width; ++j)
            stem[ints[k]->base + j - 1] =
                "I(" + std::to_string(k + 1) + "," + std::to_string(j);
    int arr_stmts = 0;
    for (const auto& s : bp.stmts)
        if (s.op == Stmt::Op::ARead1 || s.op == Stmt::Op::AWrite1 ||
            s.op == Stmt::Op::ARead2 || s.op == Stmt::Op::AWrite2)
            ++arr_stmts;
    for (int li = 0; li < bp.l(); ++li) {
        const Stmt& s = bp.stmts[li];
        std::string ln = std::to_string(li + 1);
        if (s.op == Stmt::Op::Inc)
            for (int j = 1; j <= s.int_w; ++j)
                stem[s.carry_base + j - 1] =
                    "I(r" + ln + "," + std::to_string(j);
        std::string suffix = arr_stmts > 1 ? ln : "";
        if (s.selM_base >= 0)
            for (int j = 0; j < s.arr_rows; ++j)
                stem[s.selM_base + j] = "M" + suffix + "(" + std::to_string(j);
        if (s.selN_base >= 0)
            for (int j = 0; j < s.arr_cols; ++j)
                stem[s.selN_base + j] = "N" + suffix + "(" + std::to_string(j);
    }
    return stem;
}

class Compiler {
  public:
    Compiler(const BasicProgram& bp, int p) : bp_(bp), p_(p) {
        q_ = bp.table.q;
        l_ = bp.l();
        if (l_ == 0) throw Error("empty program");
        if (p_ < l_)
            throw Error("step budget " + std::to_string(p_) +
                        " is below the program length " + std::to_string(l_));
        Stmt::Op last = bp.stmts.back().op;
        if (last != Stmt::Op::Return && last != Stmt::Op::Goto)
            throw Error("the last line must be 'return' or 'go to'");
        for (const auto& s : bp.stmts)
            if (s.op == Stmt::Op::IfGoto &&
                (&s - bp.stmts.data()) + 1 == static_cast<std::ptrdiff_t>(l_))
                throw Error("a conditional jump cannot be the last line");
    }

    int B(int slot, int t) const { return t * q_ + slot; }
    int S(int i, int t) const { return (p_ + 1) * q_ + (t - 1) * l_ + (i - 1); }

    WEFSystem run() {
        WEFSystem w;
        LPSystem& lp = w.lp;
        std::vector<std::string> stem = slot_name_stems(bp_);
        for (int t = 0; t <= p_; ++t)
            for (int i = 0; i < q_; ++i)
                lp.add_var(stem[i] + "," + std::to_string(t) + ")");
        for (int t = 1; t <= p_; ++t)
            for (int i = 1; i <= l_; ++i)
                lp.add_var("S(" + std::to_string(i) + "," +
                           std::to_string(t) + ")");
        for (int slot : bp_.table.input_slots) w.x_vars.push_back(B(slot, 0));
        w.w_var = B(bp_.table.w_slot, p_);

        emit_c(lp);
        emit_d(lp);
        emit_e(lp);
        for (int t = 1; t <= p_ - 1; ++t)
            for (int i = 1; i <= l_; ++i) emit_f(lp, i, t);
        for (int t = 1; t <= p_; ++t)
            for (int i = 1; i <= l_; ++i) emit_g(lp, i, t);
        w.finalize_stats();
        return w;
    }

  private:
    using Row = std::vector<std::pair<VarId, int>>;

    static void le(LPSystem& lp, const std::string& label, const Row& r,
                   int rhs) {
        std::vector<Term> ts;
        for (const auto& [v, k] : r) ts.push_back({v, Rat(k)});
        lp.add_le(std::move(ts), Rat(rhs), label);
    }

    void emit_c(LPSystem& lp) {
        std::vector<char> is_input(q_, 0);
        for (int s : bp_.table.input_slots) is_input[s] = 1;
        for (int i = 0; i < q_; ++i)
            if (!is_input[i])
                lp.add_eq({{B(i, 0), Rat(1)}}, Rat(0),
                          "C slot=" + std::to_string(i + 1));
    }

    void emit_d(LPSystem& lp) {
        lp.add_eq({{S(1, 1), Rat(1)}}, Rat(1), "D start");
    }

    void emit_e(LPSystem& lp) {
        for (int t = 1; t <= p_; ++t) {
            std::vector<Term> ts;
            for (int i = 1; i <= l_; ++i) ts.push_back({S(i, t), Rat(1)});
            lp.add_eq(std::move(ts), Rat(1), "E t=" + std::to_string(t));
        }
    }

    void emit_f(LPSystem& lp, int i, int t) {
        const Stmt& s = bp_.stmts[i - 1];
        std::string at = " i=" + std::to_string(i) + " t=" + std::to_string(t);
        switch (s.op) {
            case Stmt::Op::Goto:
                le(lp, "F(ii)" + at, {{S(i, t), 1}, {S(s.target, t + 1), -1}},
                   0);
                break;
            case Stmt::Op::Return:
                le(lp, "F(iii)" + at, {{S(i, t), 1}, {S(i, t + 1), -1}}, 0);
                break;
            case Stmt::Op::IfGoto:
                le(lp, "F(iv)" + at,
                   {{S(i, t), 1}, {B(s.cond, t - 1), 1},
                    {S(s.target, t + 1), -1}},
                   1);
                le(lp, "F(iv)" + at,
                   {{S(i, t), 1}, {B(s.cond, t - 1), -1},
                    {S(i + 1, t + 1), -1}},
                   0);
                break;
            default:
                le(lp, "F(i)" + at, {{S(i, t), 1}, {S(i + 1, t + 1), -1}}, 0);
                break;
        }
    }

    // Copy rows for every slot the statement does not write.
    void emit_copies(LPSystem& lp, int i, int t, const Stmt& s) {
        std::vector<char> written(q_, 0);
        for (int k : write_set(s)) written[k] = 1;
        std::string at = " i=" + std::to_string(i) + " t=" + std::to_string(t);
        for (int k = 0; k < q_; ++k) {
            if (written[k]) continue;
            std::string lb = "G(i)" + at + " k=" + std::to_string(k + 1);
            le(lp, lb, {{S(i, t), 1}, {B(k, t - 1), 1}, {B(k, t), -1}}, 1);
            le(lp, lb, {{S(i, t), 1}, {B(k, t - 1), -1}, {B(k, t), 1}}, 1);
        }
    }

    // dst(t) = src(t') copied under S(i,t); both orientations.
    void copy_pair(LPSystem& lp, const std::string& lb, int i, int t, int src,
                   int dst) {
        le(lp, lb, {{S(i, t), 1}, {src, 1}, {dst, -1}}, 1);
        le(lp, lb, {{S(i, t), 1}, {src, -1}, {dst, 1}}, 1);
    }

    // s = x XOR y under S(i,t); var ids are fully resolved.
    void xor_rows(LPSystem& lp, const std::string& lb, int i, int t, int x,
                  int y, int s) {
        le(lp, lb, {{S(i, t), 1}, {x, 1}, {y, -1}, {s, -1}}, 1);
        le(lp, lb, {{S(i, t), 1}, {x, -1}, {y, -1}, {s, 1}}, 1);
        le(lp, lb, {{S(i, t), 1}, {x, -1}, {y, 1}, {s, -1}}, 1);
        le(lp, lb, {{S(i, t), 1}, {x, 1}, {y, 1}, {s, 1}}, 3);
    }

    // s = x AND y under S(i,t).
    void and_rows(LPSystem& lp, const std::string& lb, int i, int t, int x,
                  int y, int s) {
        le(lp, lb, {{S(i, t), 1}, {x, -1}, {s, 1}}, 1);
        le(lp, lb, {{S(i, t), 1}, {y, -1}, {s, 1}}, 1);
        le(lp, lb, {{S(i, t), 1}, {x, 1}, {y, 1}, {s, -1}}, 2);
    }

    // Selector column: sel(t) = 0 exactly when the index integer equals j.
    // Per-bit rows compare the index bits against the constant j; the closing
    // row caps the selector by the number of mismatches.
    void selector_rows(LPSystem& lp, const std::string& lb, int i, int t,
                       int idx_base, int W, long j, int sel) {
        Row sum{{S(i, t), 1}, {sel, 1}};
        int rhs = 1;
        for (int k = 0; k < W; ++k) {
            int bitvar = B(idx_base + k, t - 1);
            if ((j >> k) & 1) {
                // T = 1 - bit: S + (1 - bit) - sel <= 1
                le(lp, lb, {{S(i, t), 1}, {bitvar, -1}, {sel, -1}}, 0);
                sum.push_back({bitvar, 1});
                rhs += 1;
            } else {
                le(lp, lb, {{S(i, t), 1}, {bitvar, 1}, {sel, -1}}, 1);
                sum.push_back({bitvar, -1});
            }
        }
        le(lp, lb, sum, rhs);
    }

    void emit_g(LPSystem& lp, int i, int t) {
        const Stmt& s = bp_.stmts[i - 1];
        emit_copies(lp, i, t, s);
        std::string at = " i=" + std::to_string(i) + " t=" + std::to_string(t);
        switch (s.op) {
            case Stmt::Op::Const: {
                std::string lb = "G(ii)" + at;
                int dst = B(s.dst, t);
                if (s.a == 1) {
                    le(lp, lb, {{S(i, t), 1}, {dst, -1}}, 0);
                    le(lp, lb, {{S(i, t), 1}, {dst, 1}}, 2);
                } else {
                    le(lp, lb, {{S(i, t), 1}, {dst, 1}}, 1);
                    le(lp, lb, {{S(i, t), 1}, {dst, -1}}, 1);
                }
                break;
            }
            case Stmt::Op::Copy:
                copy_pair(lp, "G(ii)" + at, i, t, B(s.a, t - 1), B(s.dst, t));
                break;
            case Stmt::Op::Not: {
                std::string lb = "G(ii)" + at;
                le(lp, lb, {{S(i, t), 1}, {B(s.a, t - 1), 1}, {B(s.dst, t), 1}},
                   2);
                le(lp, lb,
                   {{S(i, t), 1}, {B(s.a, t - 1), -1}, {B(s.dst, t), -1}}, 0);
                break;
            }
            case Stmt::Op::Xor:
                xor_rows(lp, "G(iii)" + at, i, t, B(s.a, t - 1), B(s.b, t - 1),
                         B(s.dst, t));
                break;
            case Stmt::Op::And:
                and_rows(lp, "G(iv)" + at, i, t, B(s.a, t - 1), B(s.b, t - 1),
                         B(s.dst, t));
                break;
            case Stmt::Op::Or:
            case Stmt::Op::OrK: {
                std::string lb = "G(v)" + at;
                std::vector<int> xs;
                if (s.op == Stmt::Op::Or)
                    xs = {s.a, s.b};
                else
                    xs = s.ops;
                int dst = B(s.dst, t);
                Row sum{{S(i, t), 1}, {dst, 1}};
                for (int x : xs) {
                    le(lp, lb, {{S(i, t), 1}, {B(x, t - 1), 1}, {dst, -1}}, 1);
                    sum.push_back({B(x, t - 1), -1});
                }
                le(lp, lb, sum, 1);
                break;
            }
            case Stmt::Op::Inc: {
                std::string lb = "G(vi)" + at;
                int b1o = B(s.int_base, t - 1), b1n = B(s.int_base, t);
                int c1 = B(s.carry_base, t);
                le(lp, lb, {{S(i, t), 1}, {b1o, 1}, {b1n, 1}}, 2);
                le(lp, lb, {{S(i, t), 1}, {b1o, -1}, {b1n, -1}}, 0);
                copy_pair(lp, lb, i, t, b1o, c1);
                for (int j = 2; j <= s.int_w; ++j) {
                    int bo = B(s.int_base + j - 1, t - 1);
                    int bn = B(s.int_base + j - 1, t);
                    int cp = B(s.carry_base + j - 2, t);
                    int cj = B(s.carry_base + j - 1, t);
                    xor_rows(lp, lb, i, t, bo, cp, bn);
                    and_rows(lp, lb, i, t, bo, cp, cj);
                }
                break;
            }
            case Stmt::Op::EqTest: {
                std::string lb = "G(vii)" + at;
                Row sum{{S(i, t), 1}, {B(s.dst, t), -1}};
                for (int j = 0; j < s.int_w; ++j) {
                    int z = B(s.scratch_base + j, t);
                    xor_rows(lp, lb, i, t, B(s.ia_base + j, t - 1),
                             B(s.ib_base + j, t - 1), z);
                    le(lp, lb, {{S(i, t), 1}, {z, 1}, {B(s.dst, t), 1}}, 2);
                    sum.push_back({z, -1});
                }
                le(lp, lb, sum, 0);
                break;
            }
            case Stmt::Op::ARead1:
            case Stmt::Op::AWrite1: {
                std::string lb = "G(viii)" + at;
                int W = s.int_w;
                for (long j = 0; j < s.arr_rows; ++j) {
                    int sel = B(s.selM_base + j, t);
                    selector_rows(lp, lb, i, t, s.idx_base, W, j, sel);
                    if (s.op == Stmt::Op::ARead1) {
                        int dst = B(s.dst, t), cell = B(s.arr_base + j, t - 1);
                        le(lp, lb,
                           {{S(i, t), 1}, {dst, 1}, {cell, -1}, {sel, -1}}, 1);
                        le(lp, lb,
                           {{S(i, t), 1}, {dst, -1}, {cell, 1}, {sel, -1}}, 1);
                    } else {
                        int src = B(s.src, t - 1);
                        int co = B(s.arr_base + j, t - 1);
                        int cn = B(s.arr_base + j, t);
                        le(lp, lb, {{S(i, t), 1}, {src, 1}, {cn, -1}, {sel, -1}},
                           1);
                        le(lp, lb, {{S(i, t), 1}, {src, -1}, {cn, 1}, {sel, -1}},
                           1);
                        le(lp, lb, {{S(i, t), 1}, {co, 1}, {cn, -1}, {sel, 1}},
                           2);
                        le(lp, lb, {{S(i, t), 1}, {co, -1}, {cn, 1}, {sel, 1}},
                           2);
                    }
                }
                break;
            }
            case Stmt::Op::ARead2:
            case Stmt::Op::AWrite2: {
                std::string lb = "G(ix)" + at;
                int W = s.int_w;
                for (long j = 0; j < s.arr_rows; ++j)
                    selector_rows(lp, lb, i, t, s.idx_base, W, j,
                                  B(s.selM_base + j, t));
                for (long j = 0; j < s.arr_cols; ++j)
                    selector_rows(lp, lb, i, t, s.idx2_base, W, j,
                                  B(s.selN_base + j, t));
                for (long j1 = 0; j1 < s.arr_rows; ++j1) {
                    for (long j2 = 0; j2 < s.arr_cols; ++j2) {
                        int cell_o = B(s.arr_base + j1 * s.arr_cols + j2, t - 1);
                        int cell_n = B(s.arr_base + j1 * s.arr_cols + j2, t);
                        int m = B(s.selM_base + j1, t);
                        int n = B(s.selN_base + j2, t);
                        if (s.op == Stmt::Op::ARead2) {
                            int dst = B(s.dst, t);
                            le(lp, lb,
                               {{S(i, t), 1}, {dst, 1}, {cell_o, -1}, {m, -1},
                                {n, -1}},
                               1);
                            le(lp, lb,
                               {{S(i, t), 1}, {dst, -1}, {cell_o, 1}, {m, -1},
                                {n, -1}},
                               1);
                        } else {
                            int src = B(s.src, t - 1);
                            le(lp, lb,
                               {{S(i, t), 1}, {src, 1}, {cell_n, -1}, {m, -1},
                                {n, -1}},
                               1);
                            le(lp, lb,
                               {{S(i, t), 1}, {src, -1}, {cell_n, 1}, {m, -1},
                                {n, -1}},
                               1);
                            le(lp, lb,
                               {{S(i, t), 1}, {cell_o, 1}, {cell_n, -1}, {m, 1}},
                               2);
                            le(lp, lb,
                               {{S(i, t), 1}, {cell_o, -1}, {cell_n, 1}, {m, 1}},
                               2);
                            le(lp, lb,
                               {{S(i, t), 1}, {cell_o, 1}, {cell_n, -1}, {n, 1}},
                               2);
                            le(lp, lb,
                               {{S(i, t), 1}, {cell_o, -1}, {cell_n, 1}, {n, 1}},
                               2);
                        }
                    }
                }
                break;
            }
            case Stmt::Op::Goto:
            case Stmt::Op::IfGoto:
            case Stmt::Op::Return:
                break;
        }
    }

    const BasicProgram& bp_;
    int p_, q_ = 0, l_ = 0;
};

inline WEFSystem compile(const BasicProgram& bp, int p) {
    return Compiler(bp, p).run();
}

// Size guard: row and variable counts stay within a fixed multiple of
// p * q * max(W, 1).
struct SizeBound {
    long rows = 0, vars = 0, row_bound = 0, var_bound = 0;
    bool ok() const { return rows <= row_bound && vars <= var_bound; }
};

inline SizeBound size_bound(const WEFSystem& w, int p, int q, int W) {
    SizeBound b;
    long weff = std::max(W, 1);
    b.rows = w.stats.num_constraints;
    b.vars = w.stats.num_vars;
    b.row_bound = 64L * p * q * weff;
    b.var_bound = 64L * p * q;
    return b;
}

}  // namespace wefc
