#pragma once

// Basic numeric types for the whole library:
//  * Real      -- arbitrary-precision float (MPFR-backed), runtime precision
//  * Rational  -- exact rational (GMP mpq)
//  * Integer   -- exact integer (GMP mpz)
//  * cplx<T>   -- minimal complex template usable with T = double and T = Real
//
// We do not use std::complex<Real>: instantiating std::complex with a
// non-builtin floating type is undefined behaviour, and the transcendental
// overloads silently fall back to the wrong precision.  cplx<T> implements the
// handful of operations we need (arithmetic, exp/log/sqrt/pow, polar parts) on
// top of the real-valued functions, so the same templated numerics run in
// double and in multiprecision.

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <sstream>

namespace eisenkron {

namespace mp = boost::multiprecision;

using Real     = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Rational = mp::mpq_rational;
using Integer  = mp::mpz_int;

using i64 = std::int64_t;
using u64 = std::uint64_t;

namespace detail {
inline unsigned& precision_bits_storage() {
    static unsigned bits = 128;
    return bits;
}
} // namespace detail

/// Set the working precision of Real in bits.  The MPFR backend is configured
/// in decimal digits, so we round up; the resulting binary precision is at
/// least the requested number of bits.
inline void set_precision_bits(unsigned bits) {
    if (bits < 24 || bits > 1u << 20)
        throw std::invalid_argument("set_precision_bits: bits out of range");
    const unsigned digits10 = static_cast<unsigned>(
        std::ceil(static_cast<double>(bits) * 0.3010299956639812)) + 2;
    Real::default_precision(digits10);
    detail::precision_bits_storage() = bits;
}

inline unsigned precision_bits() { return detail::precision_bits_storage(); }

/// Working precision requested through the environment (EISENKRON_PRECISION,
/// in bits), falling back to 128.
inline unsigned precision_bits_from_env() {
    const char* env = std::getenv("EISENKRON_PRECISION");
    if (!env || !*env) return 128;
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v < 24 || v > (1ul << 20)) return 128;
    return static_cast<unsigned>(v);
}

template <class T> inline T pi() { return boost::math::constants::pi<T>(); }
template <class T> inline T two_pi() { return boost::math::constants::two_pi<T>(); }
template <class T> inline T euler_gamma() { return boost::math::constants::euler<T>(); }

// ---------------------------------------------------------------------------
// cplx<T>
// ---------------------------------------------------------------------------

template <class T>
struct cplx {
    T re{}, im{};

    cplx() = default;
    cplx(const T& r) : re(r), im(T(0)) {}
    cplx(const T& r, const T& i) : re(r), im(i) {}
    cplx(int r) : re(T(r)), im(T(0)) {}

    cplx& operator+=(const cplx& o) { re += o.re; im += o.im; return *this; }
    cplx& operator-=(const cplx& o) { re -= o.re; im -= o.im; return *this; }
    cplx& operator*=(const cplx& o) {
        const T r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    cplx& operator/=(const cplx& o) {
        const T d = o.re * o.re + o.im * o.im;
        const T r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = r;
        return *this;
    }
    cplx& operator*=(const T& s) { re *= s; im *= s; return *this; }
    cplx& operator/=(const T& s) { re /= s; im /= s; return *this; }

    friend cplx operator+(cplx a, const cplx& b) { return a += b; }
    friend cplx operator-(cplx a, const cplx& b) { return a -= b; }
    friend cplx operator*(cplx a, const cplx& b) { return a *= b; }
    friend cplx operator/(cplx a, const cplx& b) { return a /= b; }
    friend cplx operator*(cplx a, const T& s) { return a *= s; }
    friend cplx operator*(const T& s, cplx a) { return a *= s; }
    friend cplx operator/(cplx a, const T& s) { return a /= s; }
    friend cplx operator/(const T& s, const cplx& a) { return cplx(s) / a; }
    friend cplx operator+(cplx a, const T& s) { a.re += s; return a; }
    friend cplx operator+(const T& s, cplx a) { a.re += s; return a; }
    friend cplx operator-(cplx a, const T& s) { a.re -= s; return a; }
    friend cplx operator-(const T& s, cplx a) { a.re = s - a.re; a.im = -a.im; return a; }
    friend cplx operator-(cplx a) { a.re = -a.re; a.im = -a.im; return a; }
    friend bool operator==(const cplx& a, const cplx& b) { return a.re == b.re && a.im == b.im; }
};

template <class T> inline cplx<T> conj(const cplx<T>& z) { return {z.re, -z.im}; }
template <class T> inline T norm(const cplx<T>& z) { return z.re * z.re + z.im * z.im; }

template <class T> inline T abs(const cplx<T>& z) {
    using std::hypot; using std::sqrt;
    if constexpr (std::is_same_v<T, double>) return hypot(z.re, z.im);
    else return sqrt(z.re * z.re + z.im * z.im);
}

template <class T> inline T arg(const cplx<T>& z) {
    using std::atan2;
    return atan2(z.im, z.re);
}

template <class T> inline cplx<T> exp(const cplx<T>& z) {
    using std::exp; using std::cos; using std::sin;
    const T m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

template <class T> inline cplx<T> log(const cplx<T>& z) {
    using std::log;
    return {log(eisenkron::abs(z)), eisenkron::arg(z)};
}

template <class T> inline cplx<T> sqrt(const cplx<T>& z) {
    using std::sqrt;
    const T m = eisenkron::abs(z);
    if (m == T(0)) return {T(0), T(0)};
    // Principal branch: Re >= 0; for negative reals the cut maps to +i side.
    T r = sqrt((m + z.re) / T(2));
    T i = sqrt((m - z.re) / T(2));
    if (z.im < T(0)) i = -i;
    return {r, i};
}

template <class T> inline cplx<T> pow(const cplx<T>& z, const T& a) {
    using std::pow;
    if (z.im == T(0) && z.re > T(0)) return {pow(z.re, a), T(0)};
    return eisenkron::exp(eisenkron::log(z) * a);
}

template <class T> inline cplx<T> pow(const cplx<T>& z, const cplx<T>& a) {
    if (a.im == T(0)) return eisenkron::pow(z, a.re);
    return eisenkron::exp(a * eisenkron::log(z));
}

template <class T> inline cplx<T> polar(const T& m, const T& theta) {
    using std::cos; using std::sin;
    return {m * cos(theta), m * sin(theta)};
}

/// e(x) = exp(2 pi i x).
template <class T> inline cplx<T> unit_exp(const T& x) {
    return polar(T(1), two_pi<T>() * x);
}

template <class T>
inline std::ostream& operator<<(std::ostream& os, const cplx<T>& z) {
    os << z.re;
    if (z.im >= T(0)) os << "+" << z.im << "i";
    else os << "-" << -z.im << "i";
    return os;
}

using CReal   = cplx<Real>;
using CDouble = cplx<double>;

// ---------------------------------------------------------------------------
// conversions
// ---------------------------------------------------------------------------

template <class T> inline T from_rational(const Rational& q);
template <> inline Real from_rational<Real>(const Rational& q) { return Real(q); }
template <> inline double from_rational<double>(const Rational& q) { return q.convert_to<double>(); }

inline double to_double(const Real& x) { return x.convert_to<double>(); }

inline std::string to_string(const Real& x, unsigned digits = 0) {
    std::ostringstream os;
    os.precision(digits ? digits : Real::default_precision());
    os << x;
    return os.str();
}

} // namespace eisenkron
