#ifndef MBOP_FIELD_HPP
#define MBOP_FIELD_HPP

// Scalar field layer: exact rationals (GMP-backed) or double, selected by
// template parameter everywhere else in the library.

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace mbop {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

template <typename F>
inline constexpr bool is_exact_field_v = !std::is_floating_point_v<F>;

template <typename F>
F field_abs(const F& x) {
    return x < F(0) ? F(-x) : x;
}

// x^e by repeated squaring; exponents are tiny throughout the library.
template <typename F>
F field_pow(const F& x, std::size_t e) {
    F result(1);
    F base = x;
    while (e > 0) {
        if (e & 1) result = result * base;
        base = base * base;
        e >>= 1;
    }
    return result;
}

// Binomial coefficient C(r, l) as a field element (exact in rational mode,
// exactly representable in double for the degrees this library handles).
template <typename F>
F field_binomial(std::size_t r, std::size_t l) {
    if (l > r) return F(0);
    F acc(1);
    for (std::size_t i = 1; i <= l; ++i) {
        acc = acc * F(static_cast<long>(r - l + i)) / F(static_cast<long>(i));
    }
    return acc;
}

// (k+m)!/k! = (k+1)(k+2)...(k+m), the m-th derivative factor of x^{k+m}.
template <typename F>
F falling_factorial_ratio(std::size_t k, std::size_t m) {
    F acc(1);
    for (std::size_t i = 1; i <= m; ++i) acc = acc * F(static_cast<long>(k + i));
    return acc;
}

// Parses "num", "-num" or "num/den". Division canonicalizes, so the result
// is always in lowest terms regardless of the input.
inline Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(Integer(text));
        }
        Integer num(text.substr(0, slash));
        Integer den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num) / Rational(den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational literal: \"" + text + "\"");
    }
}

inline std::string rational_to_string(const Rational& x) { return x.str(); }

template <typename F>
F field_from_string(const std::string& text) {
    if constexpr (is_exact_field_v<F>) {
        return parse_rational(text);
    } else {
        // Float mode accepts both rational literals and decimal notation.
        if (text.find('/') != std::string::npos) {
            return parse_rational(text).template convert_to<F>();
        }
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end == nullptr || *end != '\0' || end == text.c_str()) {
            throw std::invalid_argument("not a numeric literal: \"" + text + "\"");
        }
        return F(v);
    }
}

// Scalar comparison: exact when tol == 0, otherwise |a-b| <= tol*max(1,|a|,|b|).
template <typename F>
bool scalars_close(const F& a, const F& b, const F& tol) {
    if (tol == F(0)) return a == b;
    F scale(1);
    if (field_abs(a) > scale) scale = field_abs(a);
    if (field_abs(b) > scale) scale = field_abs(b);
    return field_abs(F(a - b)) <= tol * scale;
}

}  // namespace mbop

#endif  // MBOP_FIELD_HPP
