#pragma once

// Exact rational arithmetic used everywhere in this library.  All solver and
// compiler results are exact; no floating point appears anywhere.

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <stdexcept>
#include <string>

namespace wefc {

// Always reduced, denominator > 0 (GMP canonical form).  Values parsed from
// strings are canonicalized explicitly; arithmetic preserves canonical form.
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal invariant violation.  Raised when the library catches itself
// producing an inconsistent state (e.g. an "optimal" point violating a row).
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

inline void internal_check(bool ok, const std::string& what) {
    if (!ok) throw InternalError("internal invariant violated: " + what);
}

// Parses "p", "-p", or "p/q" with q > 0 after sign normalization.
// Result is reduced.  Throws Error on malformed input or zero denominator.
inline Rat rat_parse(const std::string& s) {
    if (s.empty()) throw Error("empty rational literal");
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') ++i;
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
        ++digits;
    }
    if (digits == 0) throw Error("malformed rational literal: " + s);
    if (i != s.size()) {
        if (s[i] != '/') throw Error("malformed rational literal: " + s);
        ++i;
        std::size_t den_digits = 0;
        std::size_t den_start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++den_digits;
        }
        if (den_digits == 0 || i != s.size())
            throw Error("malformed rational literal: " + s);
        if (s.find_first_not_of('0', den_start) == std::string::npos)
            throw Error("zero denominator in rational literal: " + s);
    }
    Rat r(s[0] == '+' ? s.substr(1) : s);
    mpq_canonicalize(r.backend().data());
    return r;
}

// "p" when integral, else "p/q".
inline std::string rat_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline bool rat_is_integer(const Rat& r) { return denominator(r) == 1; }

inline bool rat_is_01(const Rat& r) { return r == 0 || r == 1; }

inline long rat_to_long(const Rat& r) {
    if (!rat_is_integer(r)) throw Error("not an integer: " + rat_str(r));
    return static_cast<long>(numerator(r));
}

// Decimal rendering for the LP text emitter.  Returns the decimal string and
// sets exact to whether the expansion terminated within max_digits.
inline std::string rat_decimal(const Rat& r, int max_digits, bool* exact) {
    BigInt num = numerator(r);
    BigInt den = denominator(r);
    std::string out;
    if (num < 0) {
        out += "-";
        num = -num;
    }
    BigInt whole = num / den;
    BigInt rem = num % den;
    out += whole.str();
    if (rem == 0) {
        if (exact) *exact = true;
        return out;
    }
    out += ".";
    bool terminated = false;
    for (int k = 0; k < max_digits; ++k) {
        rem *= 10;
        BigInt digit = rem / den;
        rem %= den;
        out += static_cast<char>('0' + static_cast<int>(digit));
        if (rem == 0) {
            terminated = true;
            break;
        }
    }
    if (exact) *exact = terminated;
    return out;
}

}  // namespace wefc
