#pragma once

// Special functions needed by the Eisenstein/Poincare evaluators: Bernoulli
// numbers, Hurwitz and Riemann zeta (complex first argument), Dirichlet
// L-series for Kronecker characters, the Gamma function on C, incomplete
// gamma, Gauss-Legendre quadrature, and the Tricomi/Whittaker confluent
// hypergeometric functions for real parameters.
//
// Everything is templated over the scalar type; multiprecision paths size
// their internal truncations from the currently active precision, so callers
// must set the working precision before evaluating.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "core.hpp"
#include "numtheory.hpp"

namespace eisenkron {

// ---------------------------------------------------------------------------
// Bernoulli numbers (exact)
// ---------------------------------------------------------------------------

/// B_0 .. B_n as exact rationals (B_1 = -1/2), cached across calls.
inline const std::vector<Rational>& bernoulli_table(std::size_t n) {
    static std::vector<Rational> tab{Rational(1), Rational(-1, 2)};
    while (tab.size() <= n) {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0  for m >= 1
        std::size_t m = tab.size();
        Rational acc(0);
        Integer binom = 1;  // C(m+1, 0)
        for (std::size_t j = 0; j < m; ++j) {
            acc += Rational(binom) * tab[j];
            binom = binom * Integer(m + 1 - j) / Integer(j + 1);
        }
        tab.push_back(-acc / Rational(binom));  // binom = C(m+1, m) = m+1
    }
    return tab;
}

inline Rational bernoulli(std::size_t n) { return bernoulli_table(n)[n]; }

/// Bernoulli polynomial B_n(x), exact for rational x.
inline Rational bernoulli_poly(std::size_t n, const Rational& x) {
    const auto& B = bernoulli_table(n);
    Rational acc(0), xp(1);
    Integer binom = 1;
    // B_n(x) = sum_k C(n,k) B_{n-k} x^k
    for (std::size_t k = 0; k <= n; ++k) {
        acc += Rational(binom) * B[n - k] * xp;
        xp *= x;
        binom = binom * Integer(n - k) / Integer(k + 1);
    }
    return acc;
}

namespace detail {

template <class T>
int working_digits10() {
    if constexpr (std::is_same_v<T, double>) return 17;
    else return static_cast<int>(T(1).precision());
}

/// RAII guard-digit scope for sums with internal cancellation (Spouge series,
/// Euler-Maclaurin at negative Re s).  Two things are needed with boost's
/// variable-precision numbers: raising the thread default (so fresh constants
/// like pi come out wide) and widening the inputs in place (arithmetic results
/// inherit the widest operand precision, not the default).  Results should be
/// narrowed back before returning so callers don't silently inflate.  No-op
/// for double.
template <class T>
struct precision_scope {
    unsigned base = 0, raised = 0;
    explicit precision_scope(unsigned extra_digits) {
        if constexpr (!std::is_same_v<T, double>) {
            base = T::default_precision();
            raised = base + extra_digits;
            T::default_precision(raised);
        } else {
            (void)extra_digits;
        }
    }
    precision_scope(const precision_scope&) = delete;
    ~precision_scope() {
        if constexpr (!std::is_same_v<T, double>) T::default_precision(base);
    }
    void widen(T& x) const {
        if constexpr (!std::is_same_v<T, double>) x.precision(raised);
    }
    void widen(cplx<T>& z) const { widen(z.re), widen(z.im); }
    void narrow(T& x) const {
        if constexpr (!std::is_same_v<T, double>) x.precision(base);
    }
    void narrow(cplx<T>& z) const { narrow(z.re), narrow(z.im); }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Gamma on C (Spouge's approximation + reflection)
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
const std::vector<T>& spouge_coeffs(int a) {
    using std::exp;
    using std::pow;
    using std::sqrt;
    static std::map<std::pair<int, int>, std::vector<T>> cache;
    auto key = std::make_pair(a, working_digits10<T>());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<T> c(static_cast<std::size_t>(a));
    c[0] = sqrt(2 * pi<T>());
    T fact(1);
    for (int k = 1; k < a; ++k) {
        T ak = T(a - k);
        c[static_cast<std::size_t>(k)] =
            (k % 2 ? T(1) : T(-1)) / fact * pow(ak, T(k) - T(1) / 2) * exp(ak);
        fact *= k;
    }
    return cache.emplace(key, std::move(c)).first->second;
}

template <class T>
cplx<T> gamma_positive(const cplx<T>& z) {
    // Spouge for Re z >= 1/2: Gamma(z) = (z-1+a)^{z-1/2} e^{-(z-1+a)} S(z)
    int a = static_cast<int>(working_digits10<T>() * 1.2530) + 3;
    const auto& c = spouge_coeffs<T>(a);
    cplx<T> w = z - cplx<T>{T(1), T(0)};
    cplx<T> s{c[0], T(0)};
    for (int k = 1; k < a; ++k)
        s = s + cplx<T>{c[static_cast<std::size_t>(k)], T(0)} / (w + cplx<T>{T(k), T(0)});
    cplx<T> base = w + cplx<T>{T(a), T(0)};
    return pow(base, w + cplx<T>{T(1) / 2, T(0)}) * exp(-base) * s;
}

}  // namespace detail

template <class T>
cplx<T> gamma_c(const cplx<T>& z) {
    using std::cos;
    using std::cosh;
    using std::floor;
    using std::sin;
    using std::sinh;
    if (z.im == 0 && z.re <= 0 && z.re == floor(z.re))
        throw std::invalid_argument("gamma_c: pole at nonpositive integer");
    // the Spouge sum cancels down by roughly an eighth of its own length
    detail::precision_scope<T> guard(8 + static_cast<unsigned>(detail::working_digits10<T>()) / 4);
    cplx<T> zz = z;
    guard.widen(zz);
    cplx<T> out;
    if (zz.re >= T(1) / 2) {
        out = detail::gamma_positive(zz);
    } else {
        // reflection Gamma(z) Gamma(1-z) = pi / sin(pi z)
        cplx<T> pz = cplx<T>{pi<T>(), T(0)} * zz;
        cplx<T> s{sin(pz.re) * cosh(pz.im), cos(pz.re) * sinh(pz.im)};
        out = cplx<T>{pi<T>(), T(0)} / (s * detail::gamma_positive(cplx<T>{T(1), T(0)} - zz));
    }
    guard.narrow(out);
    return out;
}

template <class T>
T gamma_r(T x) {
    return gamma_c<T>({x, T(0)}).re;
}

// ---------------------------------------------------------------------------
// Hurwitz zeta (complex s, real a > 0) via Euler-Maclaurin
// ---------------------------------------------------------------------------

namespace detail {

/// Euler-Maclaurin evaluation of zeta(s, a); with deflate the simple pole is
/// removed, i.e. the return value is zeta(s, a) - 1/(s-1), entire in s.
template <class T>
cplx<T> hurwitz_em(const cplx<T>& s_in, const T& a_in, bool deflate) {
    using std::abs;
    using std::log;
    using std::pow;
    // at negative Re s the partial sums grow like M^{1-Re s} and cancel back
    // down to O(1); carry guard digits proportional to that growth
    unsigned extra = 8;
    if (s_in.re < 0) extra += static_cast<unsigned>(-static_cast<double>(s_in.re) * 3.0) + 3;
    precision_scope<T> guard(extra);
    cplx<T> s = s_in;
    T a = a_in;
    guard.widen(s);
    guard.widen(a);

    int digits = working_digits10<T>();
    int M = std::max(24, 2 * digits) + static_cast<int>(abs(s.im));
    int J = std::max(12, digits);
    const auto& B = bernoulli_table(static_cast<std::size_t>(2 * J));

    cplx<T> one{T(1), T(0)};
    cplx<T> acc{T(0), T(0)};
    for (int k = 0; k < M; ++k) acc = acc + pow(cplx<T>{a + k, T(0)}, -s);
    cplx<T> ma{a + M, T(0)};
    if (!deflate) {
        acc = acc + pow(ma, one - s) / (s - one);
    } else {
        // ((M+a)^{1-s} - 1) / (s-1) = -L sum_{k>=1} w^{k-1}/k!,  w = (1-s) L,
        // L = log(M+a); regular at s = 1
        T L = log(a + M);
        cplx<T> w = (one - s) * L;
        if (abs(w) < T(1) / 2) {
            cplx<T> term = one, series = one;
            for (int k = 2; k < 200; ++k) {
                term = term * w / T(k);
                series = series + term;
                if (abs(term) < pow(T(10), -digits - 8)) break;
            }
            acc = acc - series * L;
        } else {
            acc = acc + (exp(w) - one) / (s - one);
        }
    }
    cplx<T> mas = pow(ma, -s);
    acc = acc + mas / cplx<T>{T(2), T(0)};
    // sum_{j>=1} B_{2j}/(2j)! * (s)_{2j-1} * (M+a)^{-s-2j+1}
    cplx<T> poch = s;                     // (s)_1
    cplx<T> mpow = mas * (a + M);         // (M+a)^{-s+1}
    T fact(2);                            // (2j)!
    for (int j = 1; j <= J; ++j) {
        mpow = mpow / ((a + M) * (a + M));
        cplx<T> term = from_rational<T>(B[static_cast<std::size_t>(2 * j)]) / fact * poch * mpow;
        acc = acc + term;
        // update (s)_{2j-1} -> (s)_{2j+1} and (2j)! -> (2j+2)!
        poch = poch * (s + cplx<T>{T(2 * j - 1), T(0)}) * (s + cplx<T>{T(2 * j), T(0)});
        fact *= (2 * j + 1) * (2 * j + 2);
    }
    guard.narrow(acc);
    return acc;
}

}  // namespace detail

template <class T>
cplx<T> hurwitz_zeta(const cplx<T>& s, const T& a) {
    if (!(a > 0)) throw std::invalid_argument("hurwitz_zeta: need a > 0");
    if (s.im == 0 && s.re == 1) throw std::invalid_argument("hurwitz_zeta: pole at s = 1");
    return detail::hurwitz_em(s, a, false);
}

/// zeta(s, a) - 1/(s-1): entire in s, safe at and near s = 1, where the value
/// is -digamma(a).
template <class T>
cplx<T> hurwitz_zeta_deflated(const cplx<T>& s, const T& a) {
    if (!(a > 0)) throw std::invalid_argument("hurwitz_zeta_deflated: need a > 0");
    return detail::hurwitz_em(s, a, true);
}

template <class T>
cplx<T> riemann_zeta(const cplx<T>& s) {
    return hurwitz_zeta(s, T(1));
}

template <class T>
T riemann_zeta_r(const T& s) {
    return hurwitz_zeta(cplx<T>{s, T(0)}, T(1)).re;
}

/// Completed zeta  pi^{-s/2} Gamma(s/2) zeta(s), invariant under s -> 1-s.
template <class T>
cplx<T> completed_zeta(const cplx<T>& s) {
    cplx<T> half{T(1) / 2, T(0)};
    return pow(cplx<T>{pi<T>(), T(0)}, -s * half) * gamma_c(s * half) * riemann_zeta(s);
}

// ---------------------------------------------------------------------------
// Dirichlet L-series of the Kronecker character chi_D, D fundamental
// ---------------------------------------------------------------------------

template <class T>
cplx<T> dirichlet_l_kronecker(i64 D, const cplx<T>& s) {
    auto [d0, f] = fundamental_split(D);
    if (D == 0 || d0 != D || f != 1)
        throw std::invalid_argument("dirichlet_l_kronecker: D must be a fundamental discriminant");
    if (D == 1) return riemann_zeta(s);
    i64 q = std::abs(D);
    // L(chi, s) = q^{-s} sum_r chi(r) zeta_H(s, r/q); the deflated zeta drops
    // the 1/(s-1) poles, which cancel anyway since sum_r chi(r) = 0, so the
    // formula is valid at s = 1 too
    cplx<T> acc{T(0), T(0)};
    for (i64 r = 1; r <= q; ++r) {
        int ch = kronecker(D, r);
        if (ch == 0) continue;
        cplx<T> z = hurwitz_zeta_deflated(s, T(r) / q);
        acc = acc + (ch > 0 ? z : -z);
    }
    return pow(cplx<T>{T(q), T(0)}, -s) * acc;
}

// ---------------------------------------------------------------------------
// Upper incomplete gamma (real arguments, x > 0)
// ---------------------------------------------------------------------------

template <class T>
T upper_incomplete_gamma(T s, T x) {
    using std::abs;
    using std::exp;
    using std::log;
    using std::pow;
    if (!(x > 0)) {
        if (x == 0 && s > 0) return gamma_r(s);
        throw std::invalid_argument("upper_incomplete_gamma: need x > 0");
    }
    T eps = pow(T(10), -detail::working_digits10<T>());
    if (s == 0) {
        // Gamma(0, x) = E_1(x)
        if (x < 1) {
            T term(1), acc(0);
            for (int k = 1; k < 10000; ++k) {
                term *= -x / k;
                acc -= term / k;
                if (abs(term) < eps) break;
            }
            return acc - euler_gamma<T>() - log(x);
        }
        // fall through to the continued fraction (valid at s = 0 for x >= 1)
    } else if (s < 0) {
        // upward in s: Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s
        return (upper_incomplete_gamma(s + 1, x) - pow(x, s) * exp(-x)) / s;
    }
    if (x > s + 1 || s == 0) {
        // continued fraction (modified Lentz)
        T tiny = eps * eps * eps;
        T b = x + 1 - s, c = 1 / tiny, d = 1 / b, h = d;
        for (int i = 1; i < 10000; ++i) {
            T an = -T(i) * (T(i) - s);
            b += 2;
            d = an * d + b;
            if (abs(d) < tiny) d = tiny;
            c = b + an / c;
            if (abs(c) < tiny) c = tiny;
            d = 1 / d;
            T del = d * c;
            h *= del;
            if (abs(del - 1) < eps) break;
        }
        return exp(-x + s * log(x)) * h;
    }
    // series for the lower incomplete gamma, subtract from Gamma(s)
    T ap = s, sum = 1 / s, del = sum;
    for (int i = 0; i < 100000; ++i) {
        ap += 1;
        del *= x / ap;
        sum += del;
        if (abs(del) < abs(sum) * eps) break;
    }
    return gamma_r(s) - sum * exp(-x + s * log(x));
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [-1, 1]
// ---------------------------------------------------------------------------

template <class T>
const std::pair<std::vector<T>, std::vector<T>>& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    static std::map<std::pair<int, int>, std::pair<std::vector<T>, std::vector<T>>> cache;
    auto key = std::make_pair(n, detail::working_digits10<T>());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<T> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    int iters = 8 + detail::working_digits10<T>() / 8;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        T xi = T(std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5)));
        T pp(0);
        for (int it2 = 0; it2 < iters; ++it2) {
            // Legendre P_n(xi) by recurrence, with derivative
            T p0(1), p1 = xi;
            for (int k = 2; k <= n; ++k) {
                T p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (xi * p1 - p0) / (xi * xi - 1);
            xi -= p1 / pp;
        }
        x[static_cast<std::size_t>(i)] = -xi;
        x[static_cast<std::size_t>(n - 1 - i)] = xi;
        T wi = 2 / ((1 - xi * xi) * pp * pp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
    return cache.emplace(key, std::make_pair(std::move(x), std::move(w))).first->second;
}

/// integral of f over [lo, hi] with an n-point Gauss-Legendre rule
template <class T, class F>
T gl_integrate(F&& f, T lo, T hi, int n) {
    const auto& [x, w] = gauss_legendre<T>(n);
    T mid = (lo + hi) / 2, hl = (hi - lo) / 2, acc(0);
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(mid + hl * x[i]);
    return acc * hl;
}

// ---------------------------------------------------------------------------
// Tricomi U(a, b, y) and Whittaker W_{kappa, mu}(y), real parameters, y > 0
// ---------------------------------------------------------------------------

template <class T>
T tricomi_u(T a, T b, T y) {
    using std::abs;
    using std::exp;
    using std::floor;
    using std::pow;
    if (!(y > 0)) throw std::invalid_argument("tricomi_u: need y > 0");
    if (!(a > 0)) {
        // Kummer transform U(a,b,y) = y^{1-b} U(1+a-b, 2-b, y)
        T a2 = 1 + a - b;
        if (a2 > 0) return pow(y, 1 - b) * tricomi_u(a2, 2 - b, y);
        // Neither parameter positive: step down from a + k > 0 with the
        // three-term recurrence in a (stable in the decreasing direction):
        // U(a-1) = (2a - b + y) U(a) - a (a - b + 1) U(a+1)
        i64 k = static_cast<i64>(floor(-a)) + 1;
        T ah = a + k;
        T u1 = tricomi_u(ah, b, y), u0 = tricomi_u(ah + 1, b, y);
        for (i64 i = 0; i < k; ++i) {
            T un = (2 * ah - b + y) * u1 - ah * (ah - b + 1) * u0;
            u0 = u1;
            u1 = un;
            ah -= 1;
        }
        return u1;
    }
    // Gamma(a) U = int_0^inf e^{-yt} t^{a-1} (1+t)^{b-a-1} dt.
    // Head [0, t0] by a power series (t0 <= 1/y so the exponential part stays
    // tame), remainder by Gauss-Legendre on geometrically growing panels.
    T eps = pow(T(10), -detail::working_digits10<T>() - 4);
    T p = b - a - 1;
    T t0 = y > 2 ? 1 / y : T(1) / 2;

    // e^{-y t0 u} (1 + t0 u)^p = sum_m cm u^m; integrate t^{a-1} termwise
    int terms = 4 * (detail::working_digits10<T>() + 6);
    std::vector<T> ce(static_cast<std::size_t>(terms)), cb(static_cast<std::size_t>(terms));
    ce[0] = 1;
    cb[0] = 1;
    for (int m = 1; m < terms; ++m) {
        ce[static_cast<std::size_t>(m)] = ce[static_cast<std::size_t>(m - 1)] * (-y * t0) / m;
        cb[static_cast<std::size_t>(m)] =
            cb[static_cast<std::size_t>(m - 1)] * (p - (m - 1)) / m * t0;
    }
    T head(0);
    int quiet = 0;
    for (int m = 0; m < terms && quiet < 8; ++m) {
        T cm(0);
        for (int j = 0; j <= m; ++j)
            cm += ce[static_cast<std::size_t>(j)] * cb[static_cast<std::size_t>(m - j)];
        head += cm / (a + m);
        quiet = (abs(cm) < eps * abs(head)) ? quiet + 1 : 0;
    }
    head *= pow(t0, a);

    auto integrand = [&](T t) { return exp(-y * t) * pow(t, a - 1) * pow(1 + t, p); };
    int nodes = 24 + 2 * detail::working_digits10<T>();
    T tail(0), lo = t0, len = t0;
    for (int panel = 0; panel < 400; ++panel) {
        T hi = lo + len;
        tail += gl_integrate<T>(integrand, lo, hi, nodes);
        lo = hi;
        len *= 2;
        // once  d/dt log f < -y/2  on [lo, inf) the remaining integral is
        // bounded by 2 f(lo) / y
        T drop = y - (a > 1 ? (a - 1) / lo : T(0)) - (p > 0 ? p / (1 + lo) : T(0));
        if (drop > y / 2 && integrand(lo) * 2 / y < eps * (abs(head) + abs(tail))) break;
    }
    return (head + tail) / gamma_r(a);
}

template <class T>
T whittaker_w(T kappa, T mu, T y) {
    using std::exp;
    using std::pow;
    if (!(y > 0)) throw std::invalid_argument("whittaker_w: need y > 0");
    return exp(-y / 2) * pow(y, mu + T(1) / 2) * tricomi_u(mu - kappa + T(1) / 2, 1 + 2 * mu, y);
}

}  // namespace eisenkron
