#pragma once

// Boolean circuits over AND/OR gates with negation on literals, their
// reference evaluator, and the translation into a linear system: four
// inequalities per gate, one fresh [0,1] variable per input and per gate.
// Negated literals enter the rows as (1 - v) with the constant folded into
// the right-hand side, so NOT never costs a gate.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "wefc/wef.hpp"

namespace wefc {

// ref < q names an input; ref = q + g names gate g's output.
struct CLit {
    int ref = 0;
    bool neg = false;
};

struct CGate {
    enum class Kind { And, Or };
    Kind kind = Kind::And;
    CLit a, b;
    std::string name;
};

struct Circuit {
    std::vector<std::string> inputs;
    std::vector<CGate> gates;

    int q() const { return static_cast<int>(inputs.size()); }
    int t() const { return static_cast<int>(gates.size()); }

    const std::string& ref_name(int ref) const {
        return ref < q() ? inputs[ref] : gates[ref - q()].name;
    }

    // Acyclicity: a gate only reads inputs and strictly earlier gates.  The
    // last gate is the output; nothing can read it, by the same rule.
    void validate() const {
        if (gates.empty()) throw Error("circuit has no gates");
        for (int g = 0; g < t(); ++g) {
            for (const CLit* l : {&gates[g].a, &gates[g].b})
                if (l->ref < 0 || l->ref >= q() + g)
                    throw Error("gate " + gates[g].name +
                                " reads a non-earlier value");
            if (gates[g].name.empty()) throw Error("unnamed gate");
        }
        std::vector<std::string> seen = inputs;
        for (const auto& g : gates) seen.push_back(g.name);
        for (std::size_t i = 0; i < seen.size(); ++i)
            for (std::size_t j = i + 1; j < seen.size(); ++j)
                if (seen[i] == seen[j]) throw Error("duplicate name " + seen[i]);
    }
};

struct EvalResult {
    int w = 0;
    std::vector<std::uint8_t> gate_values;
};

inline EvalResult eval(const Circuit& c, const std::vector<std::uint8_t>& input) {
    if (static_cast<int>(input.size()) != c.q())
        throw Error("input length mismatch: want " + std::to_string(c.q()));
    EvalResult r;
    r.gate_values.resize(c.t());
    auto lit = [&](const CLit& l, int upto) {
        internal_check(l.ref < c.q() + upto, "literal order violation");
        int v = l.ref < c.q() ? input[l.ref] : r.gate_values[l.ref - c.q()];
        return l.neg ? 1 - v : v;
    };
    for (int g = 0; g < c.t(); ++g) {
        int a = lit(c.gates[g].a, g), b = lit(c.gates[g].b, g);
        r.gate_values[g] =
            c.gates[g].kind == CGate::Kind::And ? (a & b) : (a | b);
    }
    r.w = r.gate_values.back();
    return r;
}

// --------------------------------------------------------------------------
// Encoding.  Exactly 4t rows over q+t variables.

inline WEFSystem encode(const Circuit& c) {
    c.validate();
    WEFSystem wef;
    for (const auto& nm : c.inputs) wef.x_vars.push_back(wef.lp.add_var(nm));
    for (const auto& g : c.gates) wef.lp.add_var(g.name);

    // Appends sign * literal to a row under construction, folding the
    // constant of a negated literal into the right-hand side.
    auto put = [&](std::vector<Term>& terms, Rat& rhs, const CLit& l, int sign) {
        if (l.neg) {
            terms.push_back({l.ref, Rat(-sign)});
            rhs -= sign;
        } else {
            terms.push_back({l.ref, Rat(sign)});
        }
    };
    for (int g = 0; g < c.t(); ++g) {
        const CGate& gate = c.gates[g];
        int y = c.q() + g;
        std::string tag =
            (gate.kind == CGate::Kind::And ? "AND " : "OR ") + gate.name;
        auto row = [&](int sa, int sb, int sy, int rhs0) {
            std::vector<Term> terms;
            Rat rhs(rhs0);
            if (sa) put(terms, rhs, gate.a, sa);
            if (sb) put(terms, rhs, gate.b, sb);
            terms.push_back({y, Rat(sy)});
            wef.lp.add_constraint(std::move(terms), Sense::LE, std::move(rhs),
                                  tag);
        };
        if (gate.kind == CGate::Kind::And) {
            row(+1, +1, -1, 1);
            row(-1, 0, +1, 0);
            row(0, -1, +1, 0);
            row(0, 0, -1, 0);
        } else {
            row(-1, -1, +1, 0);
            row(+1, 0, -1, 0);
            row(0, +1, -1, 0);
            row(0, 0, +1, 1);
        }
    }
    wef.w_var = c.q() + c.t() - 1;
    wef.finalize_stats();
    internal_check(wef.stats.num_constraints == 4 * c.t(), "row count");
    internal_check(wef.stats.num_vars == c.q() + c.t(), "variable count");
    return wef;
}

// --------------------------------------------------------------------------
// Builder conveniences for programmatic construction.

struct CircuitBuilder {
    Circuit c;

    explicit CircuitBuilder(std::vector<std::string> input_names) {
        c.inputs = std::move(input_names);
    }

    CLit in(int i) const { return {i, false}; }

    CLit gate(CGate::Kind k, CLit a, CLit b, const std::string& name) {
        c.gates.push_back({k, a, b, name});
        return {c.q() + c.t() - 1, false};
    }
    CLit g_and(CLit a, CLit b, const std::string& n) {
        return gate(CGate::Kind::And, a, b, n);
    }
    CLit g_or(CLit a, CLit b, const std::string& n) {
        return gate(CGate::Kind::Or, a, b, n);
    }
    static CLit neg(CLit l) { return {l.ref, !l.neg}; }

    // x ^ y = (x & !y) | (!x & y); three gates.
    CLit g_xor(CLit a, CLit b, const std::string& n) {
        CLit p = g_and(a, neg(b), n + "_p");
        CLit m = g_and(neg(a), b, n + "_m");
        return g_or(p, m, n);
    }

    // k-way OR as a left chain of binary ORs.
    CLit g_or_chain(const std::vector<CLit>& ls, const std::string& n) {
        if (ls.empty()) throw Error("empty or-chain");
        CLit acc = ls[0];
        for (std::size_t i = 1; i < ls.size(); ++i)
            acc = g_or(acc, ls[i],
                       i + 1 == ls.size() ? n : n + "_" + std::to_string(i));
        return acc;
    }

    Circuit take(const std::string& output_name) {
        if (c.gates.empty()) throw Error("empty circuit");
        c.gates.back().name = output_name;
        c.validate();
        return std::move(c);
    }
};

// The 4-vertex matching circuit: pair each edge with its complement,
// then or the three pair-products together.  5 gates.
inline Circuit pm4_circuit() {
    CircuitBuilder b({"x12", "x13", "x14", "x23", "x24", "x34"});
    CLit y12 = b.g_and(b.in(0), b.in(5), "y12");
    CLit y13 = b.g_and(b.in(1), b.in(4), "y13");
    CLit y14 = b.g_and(b.in(2), b.in(3), "y14");
    CLit u1 = b.g_or(y12, y13, "u1");
    b.g_or(u1, y14, "w");
    return b.take("w");
}

// Same function padded to 7 gates (5 AND + 2 OR) with two self-conjunction
// repeaters; encodes to 28 rows over 13 variables.
inline Circuit pm4_circuit_paper() {
    CircuitBuilder b({"x12", "x13", "x14", "x23", "x24", "x34"});
    CLit y12 = b.g_and(b.in(0), b.in(5), "y12");
    CLit y13 = b.g_and(b.in(1), b.in(4), "y13");
    CLit y14 = b.g_and(b.in(2), b.in(3), "y14");
    CLit r12 = b.g_and(y12, y12, "r12");
    CLit u1 = b.g_or(r12, y13, "u1");
    CLit r14 = b.g_and(y14, y14, "r14");
    b.g_or(u1, r14, "w");
    return b.take("w");
}

// --------------------------------------------------------------------------
// Text format:
//   INPUTS n [names...]
//   name = lit OP lit        (OP: AND/OR or &/|; ! negates a literal)
//   OUTPUT name

inline std::string print_circuit(const Circuit& c) {
    std::ostringstream os;
    os << "INPUTS " << c.q();
    for (const auto& nm : c.inputs) os << ' ' << nm;
    os << '\n';
    auto lit = [&](const CLit& l) {
        return (l.neg ? "!" : "") + c.ref_name(l.ref);
    };
    for (const auto& g : c.gates)
        os << g.name << " = " << lit(g.a)
           << (g.kind == CGate::Kind::And ? " AND " : " OR ") << lit(g.b)
           << '\n';
    os << "OUTPUT " << c.gates.back().name << '\n';
    return os.str();
}

inline Circuit parse_circuit(const std::string& text) {
    Circuit c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool have_inputs = false;
    std::string output;
    auto fail = [&](const std::string& msg) {
        throw Error("circuit line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok[0] == '#') continue;
        if (tok == "INPUTS") {
            int n;
            if (!(ls >> n) || n < 0) fail("bad input count");
            std::string nm;
            while (ls >> nm) c.inputs.push_back(nm);
            if (c.inputs.empty())
                for (int i = 1; i <= n; ++i)
                    c.inputs.push_back("x" + std::to_string(i));
            if (static_cast<int>(c.inputs.size()) != n)
                fail("input name count disagrees with header");
            have_inputs = true;
            continue;
        }
        if (tok == "OUTPUT") {
            if (!(ls >> output)) fail("missing output name");
            continue;
        }
        if (!have_inputs) fail("gate before INPUTS header");
        std::string eq, la, op, lb;
        if (!(ls >> eq >> la >> op >> lb) || eq != "=")
            fail("want: name = lit OP lit");
        auto resolve = [&](std::string s) -> CLit {
            CLit l;
            if (!s.empty() && s[0] == '!') {
                l.neg = true;
                s.erase(0, 1);
            }
            for (int i = 0; i < c.q(); ++i)
                if (c.inputs[i] == s) {
                    l.ref = i;
                    return l;
                }
            for (int g = 0; g < c.t(); ++g)
                if (c.gates[g].name == s) {
                    l.ref = c.q() + g;
                    return l;
                }
            fail("unknown name '" + s + "'");
            return l;
        };
        CGate g;
        g.name = tok;
        g.a = resolve(la);
        g.b = resolve(lb);
        if (op == "AND" || op == "&")
            g.kind = CGate::Kind::And;
        else if (op == "OR" || op == "|")
            g.kind = CGate::Kind::Or;
        else
            fail("unknown operator '" + op + "'");
        c.gates.push_back(std::move(g));
    }
    if (c.gates.empty()) throw Error("circuit text has no gates");
    if (output.empty()) throw Error("circuit text has no OUTPUT line");
    if (c.gates.back().name != output)
        throw Error("OUTPUT names '" + output + "' but the last gate is '" +
                    c.gates.back().name + "'");
    c.validate();
    return c;
}

}  // namespace wefc
