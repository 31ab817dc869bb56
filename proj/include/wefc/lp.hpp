#pragma once

// Exact rational linear programming over boxed variables.
//
// LPSystem holds rows a.x {<=,=,>=} b with per-variable bounds (default
// [0,1]).  solve() maximizes an objective with a bounded-variable primal
// simplex using Bland's rule, so results are deterministic bit for bit.
// Feasibility is established with explicit artificial columns for the rows
// violated by the initial slack basis; the auxiliary objective is linear,
// which keeps Bland's termination argument intact.
//
// propagate_bounds derives implied bounds by exact interval arithmetic.
// Implied bounds never cut the feasible set, so ranges computed after
// propagation agree exactly with the plain two-solve var_range.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wefc/rat.hpp"

namespace wefc {

// Dense nonnegative index into an LPSystem; debug names live in the system.
using VarId = int;

enum class Sense { LE, EQ, GE };

struct Term {
    VarId var;
    Rat coef;
};

struct LinConstraint {
    std::vector<Term> terms;  // sorted by var, coefficients nonzero
    Sense sense = Sense::LE;
    Rat rhs;
    std::string label;  // group tag or debug note, emitted as a comment
};

struct Objective {
    std::vector<Term> terms;  // maximized
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct OptResult {
    SolveStatus status = SolveStatus::Infeasible;
    Rat z;                   // optimal value when Optimal
    std::vector<Rat> point;  // structural variable values when Optimal
};

struct LPSystem {
    std::vector<std::string> names;
    std::vector<Rat> lower, upper;
    std::vector<LinConstraint> cons;

    int num_vars() const { return static_cast<int>(names.size()); }

    VarId add_var(std::string name, Rat lo = Rat(0), Rat hi = Rat(1)) {
        if (lo > hi) throw Error("empty bound interval for variable " + name);
        names.push_back(std::move(name));
        lower.push_back(std::move(lo));
        upper.push_back(std::move(hi));
        return static_cast<int>(names.size()) - 1;
    }

    void set_bounds(VarId v, Rat lo, Rat hi) {
        check_var(v);
        if (lo > hi) throw Error("empty bound interval for variable " + names[v]);
        lower[v] = std::move(lo);
        upper[v] = std::move(hi);
    }

    void check_var(VarId v) const {
        if (v < 0 || v >= num_vars()) throw Error("variable index out of range");
    }

    // Merges duplicate variables, drops zero coefficients, keeps terms sorted.
    void add_constraint(std::vector<Term> terms, Sense sense, Rat rhs,
                        std::string label = "") {
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return a.var < b.var; });
        std::vector<Term> merged;
        for (auto& t : terms) {
            check_var(t.var);
            if (!merged.empty() && merged.back().var == t.var)
                merged.back().coef += t.coef;
            else
                merged.push_back(std::move(t));
        }
        std::erase_if(merged, [](const Term& t) { return t.coef == 0; });
        cons.push_back(LinConstraint{std::move(merged), sense, std::move(rhs),
                                     std::move(label)});
    }

    void add_le(std::vector<Term> t, Rat rhs, std::string label = "") {
        add_constraint(std::move(t), Sense::LE, std::move(rhs), std::move(label));
    }
    void add_ge(std::vector<Term> t, Rat rhs, std::string label = "") {
        add_constraint(std::move(t), Sense::GE, std::move(rhs), std::move(label));
    }
    void add_eq(std::vector<Term> t, Rat rhs, std::string label = "") {
        add_constraint(std::move(t), Sense::EQ, std::move(rhs), std::move(label));
    }

    Rat activity(const LinConstraint& c, const std::vector<Rat>& point) const {
        Rat a = 0;
        for (const auto& t : c.terms) a += t.coef * point[t.var];
        return a;
    }

    bool satisfied(const LinConstraint& c, const std::vector<Rat>& point) const {
        Rat a = activity(c, point);
        switch (c.sense) {
            case Sense::LE: return a <= c.rhs;
            case Sense::EQ: return a == c.rhs;
            case Sense::GE: return a >= c.rhs;
        }
        return false;
    }

    bool point_feasible(const std::vector<Rat>& point) const {
        for (int v = 0; v < num_vars(); ++v)
            if (point[v] < lower[v] || point[v] > upper[v]) return false;
        for (const auto& c : cons)
            if (!satisfied(c, point)) return false;
        return true;
    }
};

// Returns a copy with each listed variable's bounds pinned to its value.
// A value outside the declared bounds is an error.
inline LPSystem fix_vars(const LPSystem& sys,
                         const std::vector<std::pair<VarId, Rat>>& fixes) {
    LPSystem out = sys;
    for (const auto& [v, val] : fixes) {
        out.check_var(v);
        if (val < sys.lower[v] || val > sys.upper[v])
            throw Error("fix_vars: value " + rat_str(val) + " outside bounds of " +
                        sys.names[v]);
        out.lower[v] = val;
        out.upper[v] = val;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Simplex engine.  A constructed engine may be asked to maximize several
// objectives in sequence; later calls warm-start from the current basis.

class Simplex {
public:
    explicit Simplex(const LPSystem& sys) : sys_(&sys) { build(); }

    // Establishes a feasible basis.  False when no feasible point exists.
    // Idempotent.
    bool ensure_feasible() {
        if (feas_checked_) return !infeasible_;
        if (!arts_.empty()) {
            std::vector<Rat> cvec(total_, Rat(0));
            for (int a : arts_) cvec[a] = Rat(-1);
            StepOutcome out = run_phase(cvec, /*phase1=*/true);
            internal_check(out == StepOutcome::Optimal, "auxiliary phase unbounded");
            for (int a : arts_) {
                Rat v = value_of(a);
                internal_check(v >= 0, "artificial below zero");
                if (v != 0) {
                    infeasible_ = true;
                    break;
                }
            }
            if (!infeasible_) {
                for (int a : arts_) {  // pinned; never eligible again
                    lo_[a] = {true, Rat(0)};
                    up_[a] = {true, Rat(0)};
                }
            }
        }
        feas_checked_ = true;
        return !infeasible_;
    }

    OptResult maximize(const Objective& obj) {
        OptResult res;
        if (!ensure_feasible()) {
            res.status = SolveStatus::Infeasible;
            return res;
        }
        std::vector<Rat> cvec(total_, Rat(0));
        for (const auto& t : obj.terms) {
            if (t.var < 0 || t.var >= n_)
                throw Error("objective variable out of range");
            cvec[t.var] += t.coef;
        }
        StepOutcome out = run_phase(cvec, /*phase1=*/false);
        if (out == StepOutcome::Unbounded) {
            res.status = SolveStatus::Unbounded;
            return res;
        }
        res.status = SolveStatus::Optimal;
        res.point.resize(n_);
        for (int v = 0; v < n_; ++v) res.point[v] = value_of(v);
        res.z = 0;
        for (const auto& t : obj.terms) res.z += t.coef * res.point[t.var];
        verify_point(res.point);
        return res;
    }

private:
    struct Bnd {
        bool finite = false;
        Rat v;
    };

    enum class StepOutcome { Progress, Optimal, Unbounded };

    const LPSystem* sys_;
    int n_ = 0;      // structural variables
    int m_ = 0;      // rows
    int total_ = 0;  // structural + slacks + artificials
    std::vector<Bnd> lo_, up_;
    std::vector<std::vector<Rat>> tab_;  // m_ rows x columns
    std::vector<Rat> rhs0_;              // constant column
    std::vector<Rat> val_;               // value of basic var per row
    std::vector<int> basic_;             // row -> var
    std::vector<int> nb_;                // col -> var
    std::vector<int> row_of_, col_of_;   // var -> row / col, -1 otherwise
    std::vector<std::uint8_t> at_up_;    // nonbasic rest side, per var
    std::vector<int> arts_;
    std::vector<Rat> obj_;  // current objective row over columns
    Rat objconst_;
    bool feas_checked_ = false;
    bool infeasible_ = false;

    static constexpr long kMaxPivots = 4000000;

    Rat nbval(int v) const {
        const Bnd& b = at_up_[v] ? up_[v] : lo_[v];
        internal_check(b.finite, "nonbasic variable resting on infinite bound");
        return b.v;
    }

    Rat value_of(int v) const {
        return row_of_[v] >= 0 ? val_[row_of_[v]] : nbval(v);
    }

    void build() {
        const LPSystem& s = *sys_;
        n_ = s.num_vars();
        m_ = static_cast<int>(s.cons.size());
        total_ = n_ + m_;
        lo_.resize(total_);
        up_.resize(total_);
        for (int v = 0; v < n_; ++v) {
            if (s.lower[v] > s.upper[v]) throw Error("empty bounds in system");
            lo_[v] = {true, s.lower[v]};
            up_[v] = {true, s.upper[v]};
        }
        for (int i = 0; i < m_; ++i) {
            int sv = n_ + i;
            switch (s.cons[i].sense) {
                case Sense::LE:
                    lo_[sv] = {true, Rat(0)};
                    up_[sv] = {false, Rat(0)};
                    break;
                case Sense::GE:
                    lo_[sv] = {false, Rat(0)};
                    up_[sv] = {true, Rat(0)};
                    break;
                case Sense::EQ:
                    lo_[sv] = {true, Rat(0)};
                    up_[sv] = {true, Rat(0)};
                    break;
            }
        }
        at_up_.assign(total_, 0);
        for (int i = 0; i < m_; ++i)
            if (s.cons[i].sense == Sense::GE) at_up_[n_ + i] = 1;

        row_of_.assign(total_, -1);
        col_of_.assign(total_, -1);
        nb_.resize(n_);
        tab_.assign(m_, std::vector<Rat>(n_, Rat(0)));
        rhs0_.resize(m_);
        val_.resize(m_);
        basic_.resize(m_);
        for (int v = 0; v < n_; ++v) {
            nb_[v] = v;
            col_of_[v] = v;
        }
        for (int i = 0; i < m_; ++i) {
            basic_[i] = n_ + i;
            row_of_[n_ + i] = i;
            rhs0_[i] = s.cons[i].rhs;
            Rat act = 0;
            for (const auto& t : s.cons[i].terms) {
                tab_[i][t.var] = t.coef;
                act += t.coef * nbval(t.var);
            }
            val_[i] = rhs0_[i] - act;
        }
        // Rows whose slack value violates its bounds get an artificial basic
        // column; the slack moves out to rest at zero (its nearest bound).
        for (int i = 0; i < m_; ++i) {
            int sv = basic_[i];
            bool low_viol = lo_[sv].finite && val_[i] < lo_[sv].v;
            bool up_viol = up_[sv].finite && val_[i] > up_[sv].v;
            if (!low_viol && !up_viol) continue;
            int sigma = up_viol ? 1 : -1;  // keeps the artificial nonnegative
            int av = total_;
            ++total_;
            lo_.push_back({true, Rat(0)});
            up_.push_back({false, Rat(0)});
            at_up_.push_back(0);
            row_of_.push_back(i);
            col_of_.push_back(-1);
            arts_.push_back(av);
            int sc = static_cast<int>(nb_.size());
            nb_.push_back(sv);
            col_of_[sv] = sc;
            row_of_[sv] = -1;
            for (auto& row : tab_) row.push_back(Rat(0));
            if (sigma == -1) {
                for (auto& x : tab_[i]) x = -x;
                rhs0_[i] = -rhs0_[i];
            }
            tab_[i][sc] = Rat(sigma);
            basic_[i] = av;
            val_[i] = sigma * val_[i];
            internal_check(val_[i] >= 0, "artificial initialization");
        }
    }

    void price_out(const std::vector<Rat>& cvec) {
        int cols = static_cast<int>(nb_.size());
        obj_.assign(cols, Rat(0));
        objconst_ = 0;
        for (int c = 0; c < cols; ++c) obj_[c] = cvec[nb_[c]];
        for (int i = 0; i < m_; ++i) {
            const Rat& cb = cvec[basic_[i]];
            if (cb == 0) continue;
            objconst_ += cb * rhs0_[i];
            for (int c = 0; c < cols; ++c)
                if (tab_[i][c] != 0) obj_[c] -= cb * tab_[i][c];
        }
    }

    StepOutcome run_phase(const std::vector<Rat>& cvec, bool phase1) {
        price_out(cvec);
        const int cols = static_cast<int>(nb_.size());
        for (long iter = 0; iter < kMaxPivots; ++iter) {
            // Entering variable: smallest index with an improving direction.
            int s = -1, ev = std::numeric_limits<int>::max(), dir = 0;
            for (int c = 0; c < cols; ++c) {
                int v = nb_[c];
                if (v >= ev) continue;
                if (lo_[v].finite && up_[v].finite && lo_[v].v == up_[v].v) continue;
                if (at_up_[v]) {
                    if (obj_[c] < 0) { s = c; ev = v; dir = -1; }
                } else {
                    if (obj_[c] > 0) { s = c; ev = v; dir = +1; }
                }
            }
            if (s < 0) return StepOutcome::Optimal;
            StepOutcome out = step(s, dir, phase1);
            if (out != StepOutcome::Progress) return out;
            if (phase1 && phase1_done()) return StepOutcome::Optimal;
        }
        throw InternalError("pivot budget exhausted");
    }

    bool phase1_done() const {
        for (int a : arts_)
            if (value_of(a) != 0) return false;
        return true;
    }

    StepOutcome step(int s, int dir, bool phase1) {
        int e = nb_[s];
        Rat sigma(dir);
        bool have_limit = false;
        Rat limit;
        int leave_row = -1;  // -1 means the entering variable's own bound
        bool leave_up = false;
        const Bnd& far = at_up_[e] ? lo_[e] : up_[e];
        if (far.finite) {
            limit = at_up_[e] ? nbval(e) - far.v : far.v - nbval(e);
            have_limit = true;
        }
        for (int i = 0; i < m_; ++i) {
            const Rat& a = tab_[i][s];
            if (a == 0) continue;
            Rat rate = -sigma * a;  // d val_i / d delta
            int bvar = basic_[i];
            Rat cand;
            bool to_up;
            if (rate > 0 && up_[bvar].finite) {
                cand = (up_[bvar].v - val_[i]) / rate;
                to_up = true;
            } else if (rate < 0 && lo_[bvar].finite) {
                cand = (val_[i] - lo_[bvar].v) / (-rate);
                to_up = false;
            } else {
                continue;
            }
            internal_check(cand >= 0, "negative ratio candidate");
            if (!have_limit || cand < limit) {
                limit = cand;
                leave_row = i;
                leave_up = to_up;
                have_limit = true;
            } else if (cand == limit && leave_row >= 0 && bvar < basic_[leave_row]) {
                // Bland tie-break among rows; a tie against the entering
                // variable's own bound keeps the bound flip.
                leave_row = i;
                leave_up = to_up;
            }
        }
        if (!have_limit) {
            internal_check(!phase1, "auxiliary objective unbounded");
            return StepOutcome::Unbounded;
        }
        if (leave_row < 0) {
            internal_check(limit > 0, "zero-length bound flip");
            for (int i = 0; i < m_; ++i) {
                const Rat& a = tab_[i][s];
                if (a != 0) val_[i] -= a * sigma * limit;
            }
            at_up_[e] = !at_up_[e];
            return StepOutcome::Progress;
        }
        pivot(leave_row, s, sigma, limit, leave_up);
        return StepOutcome::Progress;
    }

    void pivot(int r, int s, const Rat& sigma, const Rat& delta, bool leave_up) {
        int e = nb_[s];
        int L = basic_[r];
        Rat piv = tab_[r][s];
        internal_check(piv != 0, "zero pivot element");
        Rat enter_val = nbval(e) + sigma * delta;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const Rat& a = tab_[i][s];
            if (a != 0) val_[i] -= a * sigma * delta;
        }
        {
            Rat leave_val = val_[r] - piv * sigma * delta;
            const Bnd& b = leave_up ? up_[L] : lo_[L];
            internal_check(b.finite && leave_val == b.v,
                           "leaving variable missed its bound");
        }
        Rat inv = Rat(1) / piv;
        const int cols = static_cast<int>(nb_.size());
        for (int c = 0; c < cols; ++c) {
            if (c == s) continue;
            if (tab_[r][c] != 0) tab_[r][c] *= inv;
        }
        tab_[r][s] = inv;
        rhs0_[r] *= inv;
        std::vector<int> nz;
        nz.reserve(32);
        for (int c = 0; c < cols; ++c)
            if (tab_[r][c] != 0) nz.push_back(c);
        bool rhs_nz = (rhs0_[r] != 0);
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            Rat f = tab_[i][s];
            if (f == 0) continue;
            tab_[i][s] = 0;
            for (int c : nz) tab_[i][c] -= f * tab_[r][c];
            if (rhs_nz) rhs0_[i] -= f * rhs0_[r];
        }
        {
            Rat f = obj_[s];
            if (f != 0) {
                obj_[s] = 0;
                for (int c : nz) obj_[c] -= f * tab_[r][c];
                objconst_ += f * rhs0_[r];
            }
        }
        basic_[r] = e;
        row_of_[e] = r;
        col_of_[e] = -1;
        nb_[s] = L;
        col_of_[L] = s;
        row_of_[L] = -1;
        at_up_[L] = leave_up;
        val_[r] = enter_val;
    }

    void verify_point(const std::vector<Rat>& point) const {
        const LPSystem& s = *sys_;
        for (int v = 0; v < n_; ++v)
            internal_check(point[v] >= s.lower[v] && point[v] <= s.upper[v],
                           "optimal point violates bounds");
        for (const auto& c : s.cons)
            internal_check(s.satisfied(c, point), "optimal point violates a row");
    }
};

inline OptResult solve(const LPSystem& sys, const Objective& obj) {
    Simplex s(sys);
    return s.maximize(obj);
}

inline bool feasible(const LPSystem& sys) {
    Simplex s(sys);
    return s.ensure_feasible();
}

// (min, max) of variable v over the feasible set, via two solves.
// Throws Error when the system is infeasible.
inline std::pair<Rat, Rat> var_range(const LPSystem& sys, VarId v) {
    sys.check_var(v);
    Simplex s(sys);
    OptResult down = s.maximize(Objective{{{v, Rat(-1)}}});
    if (down.status == SolveStatus::Infeasible)
        throw Error("var_range: infeasible system");
    internal_check(down.status == SolveStatus::Optimal, "boxed system unbounded");
    OptResult up = s.maximize(Objective{{{v, Rat(1)}}});
    internal_check(up.status == SolveStatus::Optimal, "boxed system unbounded");
    return {-down.z, up.z};
}

// ---------------------------------------------------------------------------
// Exact interval propagation.

struct PropResult {
    bool infeasible = false;
    std::string reason;
    std::vector<Rat> lo, hi;

    bool fixed(VarId v) const { return lo[v] == hi[v]; }
    bool all_fixed() const {
        for (std::size_t v = 0; v < lo.size(); ++v)
            if (lo[v] != hi[v]) return false;
        return true;
    }
};

// Tightens variable bounds one row at a time.  Every derived bound is implied
// by the system, so the feasible set is unchanged.  Stops at a fixpoint or
// after max_sweeps full passes.
inline PropResult propagate_bounds(const LPSystem& sys, int max_sweeps = 64) {
    PropResult r;
    r.lo = sys.lower;
    r.hi = sys.upper;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        for (const auto& c : sys.cons) {
            Rat minact = 0, maxact = 0;
            for (const auto& t : c.terms) {
                if (t.coef > 0) {
                    minact += t.coef * r.lo[t.var];
                    maxact += t.coef * r.hi[t.var];
                } else {
                    minact += t.coef * r.hi[t.var];
                    maxact += t.coef * r.lo[t.var];
                }
            }
            bool need_le = (c.sense != Sense::GE);  // a.x <= rhs applies
            bool need_ge = (c.sense != Sense::LE);  // a.x >= rhs applies
            if (need_le && minact > c.rhs) {
                r.infeasible = true;
                r.reason = "row '" + c.label + "' exceeds its bound";
                return r;
            }
            if (need_ge && maxact < c.rhs) {
                r.infeasible = true;
                r.reason = "row '" + c.label + "' cannot reach its bound";
                return r;
            }
            for (const auto& t : c.terms) {
                if (need_le) {
                    Rat rest = minact - (t.coef > 0 ? t.coef * r.lo[t.var]
                                                    : t.coef * r.hi[t.var]);
                    Rat b = (c.rhs - rest) / t.coef;
                    if (t.coef > 0) {
                        if (b < r.hi[t.var]) { r.hi[t.var] = b; changed = true; }
                    } else {
                        if (b > r.lo[t.var]) { r.lo[t.var] = b; changed = true; }
                    }
                }
                if (need_ge) {
                    Rat rest = maxact - (t.coef > 0 ? t.coef * r.hi[t.var]
                                                    : t.coef * r.lo[t.var]);
                    Rat b = (c.rhs - rest) / t.coef;
                    if (t.coef > 0) {
                        if (b > r.lo[t.var]) { r.lo[t.var] = b; changed = true; }
                    } else {
                        if (b < r.hi[t.var]) { r.hi[t.var] = b; changed = true; }
                    }
                }
                if (r.lo[t.var] > r.hi[t.var]) {
                    r.infeasible = true;
                    r.reason = "empty bounds for " + sys.names[t.var];
                    return r;
                }
            }
        }
        if (!changed) break;
    }
    return r;
}

// Exact (min, max) per requested variable.  Identical values to var_range on
// each, but computed with a shared propagation presolve and one warm-started
// simplex over the reduced system.  Throws Error when infeasible.
inline std::vector<std::pair<Rat, Rat>> range_all(const LPSystem& sys,
                                                  const std::vector<VarId>& vars) {
    for (VarId v : vars) sys.check_var(v);
    PropResult prop = propagate_bounds(sys);
    if (prop.infeasible)
        throw Error("range_all: infeasible system (" + prop.reason + ")");
    int n = sys.num_vars();
    std::vector<int> remap(n, -1);
    LPSystem red;
    for (int v = 0; v < n; ++v) {
        if (prop.lo[v] != prop.hi[v])
            remap[v] = red.add_var(sys.names[v], prop.lo[v], prop.hi[v]);
    }
    for (const auto& c : sys.cons) {
        std::vector<Term> terms;
        Rat rhs = c.rhs;
        for (const auto& t : c.terms) {
            if (remap[t.var] >= 0)
                terms.push_back({remap[t.var], t.coef});
            else
                rhs -= t.coef * prop.lo[t.var];
        }
        if (terms.empty()) {
            bool ok = (c.sense == Sense::LE)   ? (Rat(0) <= rhs)
                      : (c.sense == Sense::GE) ? (Rat(0) >= rhs)
                                               : (Rat(0) == rhs);
            if (!ok)
                throw Error("range_all: infeasible system (row '" + c.label + "')");
            continue;
        }
        red.add_constraint(std::move(terms), c.sense, std::move(rhs), c.label);
    }
    std::vector<std::pair<Rat, Rat>> out;
    out.reserve(vars.size());
    if (red.num_vars() == 0) {
        for (VarId v : vars) out.emplace_back(prop.lo[v], prop.hi[v]);
        return out;
    }
    Simplex engine(red);
    if (!engine.ensure_feasible()) throw Error("range_all: infeasible system");
    for (VarId v : vars) {
        if (remap[v] < 0) {
            out.emplace_back(prop.lo[v], prop.hi[v]);
            continue;
        }
        OptResult down = engine.maximize(Objective{{{remap[v], Rat(-1)}}});
        OptResult up = engine.maximize(Objective{{{remap[v], Rat(1)}}});
        internal_check(down.status == SolveStatus::Optimal &&
                           up.status == SolveStatus::Optimal,
                       "boxed system unbounded");
        out.emplace_back(-down.z, up.z);
    }
    return out;
}

}  // namespace wefc
