#pragma once

// Serialization for LPSystem.
//
// Two emitters: classic LP text (Maximize / Subject To / Bounds / End) for
// feeding external tools and eyeballs, and a JSON dump that keeps every
// rational as an exact "p/q" string.  Only the JSON form round-trips; LP text
// renders rationals as decimals and annotates the rows it had to truncate.

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wefc/lp.hpp"

namespace wefc {

struct LpTextOpts {
    int max_decimal_digits = 12;
    // When a coefficient has no finite decimal form, append the exact row as
    // an end-of-line comment.  Off: emit the truncated decimals silently.
    bool exact_comments = true;
};

// LP-format identifiers exclude operators and brackets; debug names like
// "B(3,1)" become "B_3_1".  Collisions get a numeric suffix.
inline std::vector<std::string> lp_safe_names(const LPSystem& sys) {
    std::vector<std::string> out;
    out.reserve(sys.names.size());
    for (std::size_t i = 0; i < sys.names.size(); ++i) {
        std::string s;
        for (char ch : sys.names[i]) {
            bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '_' || ch == '.';
            s.push_back(ok ? ch : '_');
        }
        while (s.size() > 1 && s.back() == '_') s.pop_back();
        if (s.empty() || (s[0] >= '0' && s[0] <= '9')) s.insert(s.begin(), 'v');
        for (const std::string& prev : out)
            if (prev == s) {
                s += "_" + std::to_string(i);
                break;
            }
        out.push_back(std::move(s));
    }
    return out;
}

namespace detail {

inline void lp_terms(std::ostream& os, const std::vector<Term>& terms,
                     const std::vector<std::string>& names, int digits,
                     bool* all_exact) {
    bool first = true;
    for (const auto& t : terms) {
        Rat c = t.coef;
        bool neg = c < 0;
        if (neg) c = -c;
        os << (first ? (neg ? "- " : "") : (neg ? " - " : " + "));
        first = false;
        if (c != 1) {
            bool exact = true;
            os << rat_decimal(c, digits, &exact) << ' ';
            if (!exact && all_exact) *all_exact = false;
        }
        os << names[t.var];
    }
    if (first) os << "0";
}

inline void exact_terms(std::ostream& os, const std::vector<Term>& terms,
                        const std::vector<std::string>& names) {
    bool first = true;
    for (const auto& t : terms) {
        Rat c = t.coef;
        bool neg = c < 0;
        if (neg) c = -c;
        os << (first ? (neg ? "- " : "") : (neg ? " - " : " + "));
        first = false;
        if (c != 1) os << rat_str(c) << ' ';
        os << names[t.var];
    }
    if (first) os << "0";
}

inline const char* sense_str(Sense s) {
    switch (s) {
        case Sense::LE: return "<=";
        case Sense::EQ: return "=";
        case Sense::GE: return ">=";
    }
    return "?";
}

}  // namespace detail

inline void write_lp_text(std::ostream& os, const LPSystem& sys,
                          const Objective& obj, const LpTextOpts& opts = {}) {
    std::vector<std::string> nm = lp_safe_names(sys);
    const int digits = opts.max_decimal_digits;
    os << "\\ " << sys.num_vars() << " variables, " << sys.cons.size()
       << " rows\n";
    os << "Maximize\n obj: ";
    {
        bool exact = true;
        std::ostringstream line;
        detail::lp_terms(line, obj.terms, nm, digits, &exact);
        os << line.str();
        if (!exact && opts.exact_comments) {
            std::ostringstream ex;
            detail::exact_terms(ex, obj.terms, nm);
            os << " \\ exact: " << ex.str();
        }
        os << "\n";
    }
    os << "Subject To\n";
    for (std::size_t i = 0; i < sys.cons.size(); ++i) {
        const LinConstraint& c = sys.cons[i];
        if (c.terms.empty()) {
            os << "\\ c" << i << ": empty row, 0 " << detail::sense_str(c.sense)
               << ' ' << rat_str(c.rhs);
            if (!c.label.empty()) os << "  [" << c.label << "]";
            os << "\n";
            continue;
        }
        bool exact = true;
        std::ostringstream line;
        detail::lp_terms(line, c.terms, nm, digits, &exact);
        os << " c" << i << ": " << line.str() << ' ' << detail::sense_str(c.sense)
           << ' ';
        bool rhs_exact = true;
        os << rat_decimal(c.rhs, digits, &rhs_exact);
        bool comment = (!exact || !rhs_exact) && opts.exact_comments;
        if (comment || !c.label.empty()) {
            os << " \\";
            if (!c.label.empty()) os << " [" << c.label << "]";
            if (comment) {
                std::ostringstream ex;
                detail::exact_terms(ex, c.terms, nm);
                os << " exact: " << ex.str() << ' ' << detail::sense_str(c.sense)
                   << ' ' << rat_str(c.rhs);
            }
        }
        os << "\n";
    }
    os << "Bounds\n";
    for (int v = 0; v < sys.num_vars(); ++v) {
        bool le = true, ue = true;
        std::string lo = rat_decimal(sys.lower[v], digits, &le);
        std::string hi = rat_decimal(sys.upper[v], digits, &ue);
        if (sys.lower[v] == sys.upper[v])
            os << ' ' << nm[v] << " = " << lo;
        else
            os << ' ' << lo << " <= " << nm[v] << " <= " << hi;
        if ((!le || !ue) && opts.exact_comments)
            os << " \\ exact: " << rat_str(sys.lower[v]) << " .. "
               << rat_str(sys.upper[v]);
        os << "\n";
    }
    os << "End\n";
}

inline std::string lp_text(const LPSystem& sys, const Objective& obj,
                           const LpTextOpts& opts = {}) {
    std::ostringstream os;
    write_lp_text(os, sys, obj, opts);
    return os.str();
}

// --------------------------------------------------------------------------
// Structured dump.  Exact and round-trippable.

inline nlohmann::json system_to_json(const LPSystem& sys) {
    nlohmann::json j;
    j["vars"] = nlohmann::json::array();
    for (int v = 0; v < sys.num_vars(); ++v)
        j["vars"].push_back({{"name", sys.names[v]},
                             {"lo", rat_str(sys.lower[v])},
                             {"hi", rat_str(sys.upper[v])}});
    j["cons"] = nlohmann::json::array();
    for (const auto& c : sys.cons) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : c.terms)
            terms.push_back({t.var, rat_str(t.coef)});
        j["cons"].push_back({{"label", c.label},
                             {"sense", detail::sense_str(c.sense)},
                             {"rhs", rat_str(c.rhs)},
                             {"terms", std::move(terms)}});
    }
    return j;
}

inline nlohmann::json objective_to_json(const Objective& obj) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : obj.terms) terms.push_back({t.var, rat_str(t.coef)});
    return nlohmann::json{{"terms", std::move(terms)}};
}

inline Sense sense_from_str(const std::string& s) {
    if (s == "<=") return Sense::LE;
    if (s == ">=") return Sense::GE;
    if (s == "=") return Sense::EQ;
    throw Error("unknown constraint sense: " + s);
}

inline LPSystem system_from_json(const nlohmann::json& j) {
    LPSystem sys;
    try {
        for (const auto& v : j.at("vars"))
            sys.add_var(v.at("name").get<std::string>(),
                        rat_parse(v.at("lo").get<std::string>()),
                        rat_parse(v.at("hi").get<std::string>()));
        for (const auto& c : j.at("cons")) {
            std::vector<Term> terms;
            for (const auto& t : c.at("terms"))
                terms.push_back({t.at(0).get<int>(),
                                 rat_parse(t.at(1).get<std::string>())});
            sys.add_constraint(std::move(terms),
                               sense_from_str(c.at("sense").get<std::string>()),
                               rat_parse(c.at("rhs").get<std::string>()),
                               c.value("label", std::string()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed system dump: ") + e.what());
    }
    return sys;
}

inline Objective objective_from_json(const nlohmann::json& j) {
    Objective obj;
    try {
        for (const auto& t : j.at("terms"))
            obj.terms.push_back({t.at(0).get<int>(),
                                 rat_parse(t.at(1).get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed objective dump: ") + e.what());
    }
    return obj;
}

}  // namespace wefc
