#pragma once

// Real-analytic Eisenstein series on Gamma_0(N) in their half-plane of
// convergence Re(s) > 1, one family per sign of the parameter m:
//
//   * parabolic: attached to a cusp 1/c (c | N), the classical coset sum of
//     Im(sigma^{-1} gamma z)^s,
//   * hyperbolic: attached to the oriented class of an indefinite integral
//     form [a,b,c] with N | a, summing cosh(dist(gamma z, geodesic))^{-s},
//   * elliptic: attached to a positive definite class, summing
//     sinh(dist(gamma z, CM point))^{-s},
//
// together with the majorant lattice sum
//
//     2 Gamma(s) (4 pi)^{-s}  sum_{X != 0, X in L(beta, m)}  q_z(X)^{-s},
//
// where L(beta, m) is the set of forms [a, b, c] with N | a, b = beta mod 2N
// and b^2 - 4ac = 4Nm, and q_z(X) = m + (a|z|^2 + bx + c)^2 / (4N y^2) is the
// majorant value computed by majorant().  The bridge identities
//
//     q_z(X) = m cosh^2 dist(z, geodesic_X)      (m > 0)
//            = |m| sinh^2 dist(z, point_X)       (m < 0)
//            = (1/4N) width-height of z at the cusp of X, squared (m = 0)
//
// turn every coset term of an Eisenstein series into one lattice orbit term,
// so the lattice sum decomposes as a weighted average of Eisenstein series
// over the classes of L(beta, m); averaged_eisenstein_side() evaluates that
// decomposition and lattice_sum() the left-hand side, giving two independent
// routes to the same number.
//
// All evaluators truncate deterministically (enumeration order is fixed by
// the loops, no reordering) and report an empirical geometric tail estimate:
// the contribution of the outer half of the enumerated range is continued as
// a geometric series in range doublings.  est_tail is an estimate, not a
// bound; the test suite checks it against actual doubling differences.

#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "discgroup.hpp"
#include "numtheory.hpp"
#include "qforms.hpp"
#include "specfun.hpp"

namespace eisenkron {

// A truncated series value: the sum over the enumerated terms, the
// truncation bound that was applied, and the empirical tail estimate.
template <typename T>
struct TruncatedSum {
    cplx<T> value{};
    T bound{};
    T est_tail{};
};

namespace detail {

template <typename T>
i64 floor_i64(const T& v) {
    using std::floor;
    return static_cast<i64>(floor(v));
}

template <typename T>
i64 ceil_i64(const T& v) {
    using std::ceil;
    return static_cast<i64>(ceil(v));
}

// Continue an observed outer-shell contribution `delta` as a geometric series
// in range doublings with per-doubling decay 2^{-rate}.
template <typename T>
T geometric_tail(const T& delta, const T& rate) {
    using std::pow;
    if (!(rate > 0))
        throw std::invalid_argument("geometric_tail: need a positive decay rate");
    T q = pow(T(2), -rate);
    return delta * q / (T(1) - q);
}

// base^s for positive real base and complex exponent.
template <typename T>
cplx<T> pow_pc(const T& base, const cplx<T>& s) {
    using std::log;
    if (!(base > 0)) throw std::domain_error("pow_pc: base must be positive");
    return exp(s * log(base));
}

// Enumerate the forms [a, b, c] with N | a, b = beta mod 2N and
// b^2 - 4ac = D whose majorant at z is <= cap, calling f(form, majorant).
// The zero form (only a candidate when beta = 0 mod 2N and D = 0) is
// skipped.  Enumeration is by the leading coefficient and the residue class
// of b; c is then determined exactly, with the divisibility 4a | b^2 - D
// checked in 128-bit integers.
template <typename T, typename F>
void for_each_lattice_form(const Level& lv, i64 beta, i64 D, const cplx<T>& z,
                           const T& cap, F&& f) {
    using std::sqrt;
    const i64 N = lv.N;
    const i64 beta_c = mod_reduce(beta, 2 * N);
    if (mod_reduce(beta_c * beta_c - D, 4 * N) != 0)
        throw std::invalid_argument("for_each_lattice_form: D != beta^2 mod 4N");
    if (!(z.im > 0))
        throw std::invalid_argument("for_each_lattice_form: z not in the upper half plane");
    const T x = z.re, y = z.im, y2 = z.im * z.im;
    const T nz = norm(z);
    const T m = from_rational<T>(Rational(D, 4 * N));
    const T fcap2 = (cap - m) * T(4 * N) * y2;  // (a|z|^2 + bx + c)^2 <= fcap2
    if (!(fcap2 > 0)) return;
    const T fcap = sqrt(fcap2);

    auto emit = [&](i64 A, i64 b, i64 cc) {
        T fv = T(A) * nz + T(b) * x + T(cc);
        T maj = m + fv * fv / (T(4 * N) * y2);
        if (maj <= cap) f(BinaryQF{A, b, cc}, maj);
    };

    // a = 0 requires b^2 = D, so D must be a perfect square (or zero).
    if (i64 rt = 0; D == 0 || (D > 0 && is_square(D, &rt))) {
        for (i64 b : (rt == 0 ? std::vector<i64>{0} : std::vector<i64>{rt, -rt})) {
            if (mod_reduce(b, 2 * N) != beta_c) continue;
            const i64 clo = ceil_i64(-T(b) * x - fcap);
            const i64 chi = floor_i64(-T(b) * x + fcap);
            for (i64 cc = clo; cc <= chi; ++cc) {
                if (b == 0 && cc == 0) continue;  // the zero vector
                emit(0, b, cc);
            }
        }
    }

    // a != 0: c = (b^2 - D) / (4a), and |a |z|^2 + b x + c| <= fcap bounds b
    // by (2 a x + b)^2 <= 4 |a| fcap + D - 4 a^2 y^2 for either sign of a.
    T disc_q = fcap2 + y2 * T(D);
    if (disc_q < 0) disc_q = T(0);
    const i64 amax = floor_i64((fcap + sqrt(disc_q)) / (2 * y2)) + 1;
    for (i64 aa = N; aa <= amax; aa += N) {
        for (int sgn = 0; sgn < 2; ++sgn) {
            const i64 A = sgn ? -aa : aa;
            const T W = T(4 * aa) * fcap + T(D) - T(4) * T(aa) * T(aa) * y2;
            if (!(W >= 0)) continue;
            const T sw = sqrt(W);
            const T center = T(-2 * A) * x;
            const i64 k0 = ceil_i64((center - sw - T(beta_c)) / T(2 * N));
            for (i64 b = beta_c + 2 * N * k0; T(b) <= center + sw; b += 2 * N) {
                const i128 num = i128(b) * b - D;
                const i128 den = i128(4) * A;
                if (num % den != 0) continue;
                emit(A, b, checked_i64(num / den, "for_each_lattice_form: c overflow"));
            }
        }
    }
}

}  // namespace detail

// Parabolic Eisenstein series at the cusp 1/c (c | N; c = N is the cusp at
// infinity).  Scaled coset terms are ((c/N) y / |u z + v|^2)^s where (u, v)
// runs over the pairs with c | u, gcd(u, N/c) = 1, gcd(u, v) = 1, one per
// sign pair {(u,v), (-u,-v)}; these are exactly the bottom rows of the
// stabilizer cosets after conjugating the cusp to infinity.  Truncation:
// |u z + v| <= bound, with terms decaying like |u z + v|^{-2s}.
template <typename T>
TruncatedSum<T> parabolic_eisenstein(const Level& lv, i64 c, const cplx<T>& z,
                                     const cplx<T>& s, const T& bound) {
    using std::sqrt;
    if (c <= 0 || lv.N % c != 0)
        throw std::invalid_argument("parabolic_eisenstein: c must divide N");
    if (!(s.re > 1))
        throw std::domain_error("parabolic_eisenstein: need Re(s) > 1");
    if (!(z.im > 0))
        throw std::invalid_argument("parabolic_eisenstein: z not in the upper half plane");
    if (!(bound > 0))
        throw std::invalid_argument("parabolic_eisenstein: bound must be positive");

    const T x = z.re, y = z.im;
    const T b2 = bound * bound;
    const T inner2 = b2 / 4;
    const T scale = T(c) / T(lv.N);
    cplx<T> total{}, outer{};
    auto add_term = [&](i64 u, i64 v) {
        const T lin = T(u) * x + T(v);
        const T n2 = lin * lin + T(u) * T(u) * y * y;
        if (n2 > b2) return;
        const cplx<T> term = detail::pow_pc(scale * y / n2, s);
        total += term;
        if (n2 > inner2) outer += term;
    };
    if (c == lv.N) add_term(0, 1);  // the stabilizer coset itself
    const i64 nc = lv.N / c;
    const i64 umax = detail::floor_i64(bound / y);
    for (i64 u = c; u <= umax; u += c) {
        if (std::gcd(u, nc) != 1) continue;
        const T w2 = b2 - T(u) * T(u) * y * y;
        if (!(w2 >= 0)) continue;
        const T w = sqrt(w2);
        const i64 vlo = detail::ceil_i64(-T(u) * x - w);
        const i64 vhi = detail::floor_i64(-T(u) * x + w);
        for (i64 v = vlo; v <= vhi; ++v) {
            if (std::gcd(u, std::abs(v)) != 1) continue;
            add_term(u, v);
        }
    }
    TruncatedSum<T> out;
    out.value = total;
    out.bound = bound;
    out.est_tail = detail::geometric_tail(abs(outer), 2 * s.re - 2);
    return out;
}

// Hyperbolic Eisenstein series attached to the Gamma_0(N)-class of an
// indefinite form q = [a, b, c] with N | a and disc = b^2 - 4ac > 0: the sum
// of cosh(dist(gamma z, geodesic of q))^{-s} over the stabilizer cosets.
// Evaluated through the orbit of q: each coset corresponds to one form in
// the orbit, whose term is (majorant / m)^{-s/2} with m = disc / 4N.
// `bound` caps the cosh of the distance, so the majorant cap is m bound^2.
template <typename T>
TruncatedSum<T> hyperbolic_eisenstein(const Level& lv, const BinaryQF& q,
                                      const cplx<T>& z, const cplx<T>& s,
                                      const T& bound) {
    const i64 D = q.disc();
    if (D <= 0)
        throw std::invalid_argument("hyperbolic_eisenstein: need positive discriminant");
    if (mod_reduce(q.a, lv.N) != 0)
        throw std::invalid_argument("hyperbolic_eisenstein: N must divide the leading coefficient");
    if (!(s.re > 1))
        throw std::domain_error("hyperbolic_eisenstein: need Re(s) > 1");
    if (!(bound >= 1))
        throw std::invalid_argument("hyperbolic_eisenstein: bound is a cosh, must be >= 1");

    const T m = from_rational<T>(Rational(D, 4 * lv.N));
    const T cap = m * bound * bound;
    const T inner_cap = cap / 4;  // cosh <= bound / 2
    const cplx<T> mhalf_s{-s.re / 2, -s.im / 2};
    cplx<T> total{}, outer{};
    detail::for_each_lattice_form(lv, q.b, D, z, cap, [&](const BinaryQF& g, const T& maj) {
        if (!gamma0_equivalent(lv.N, q, g)) return;
        const cplx<T> term = detail::pow_pc(maj / m, mhalf_s);
        total += term;
        if (maj > inner_cap) outer += term;
    });
    TruncatedSum<T> out;
    out.value = total;
    out.bound = bound;
    out.est_tail = detail::geometric_tail(abs(outer), s.re - 1);
    return out;
}

// Elliptic Eisenstein series attached to the Gamma_0(N)-class of a positive
// definite form q (disc < 0, N | a, a > 0): the sum of
// sinh(dist(gamma z, CM point of q))^{-s} over the stabilizer cosets,
// through the orbit terms (majorant / |m|)^{-s/2}.  `bound` caps the sinh of
// the distance.  Throws if z lies in the orbit of the CM point itself, where
// the series has a logarithmic singularity.
template <typename T>
TruncatedSum<T> elliptic_eisenstein(const Level& lv, const BinaryQF& q,
                                    const cplx<T>& z, const cplx<T>& s,
                                    const T& bound) {
    const i64 D = q.disc();
    if (D >= 0 || q.a <= 0)
        throw std::invalid_argument("elliptic_eisenstein: need a positive definite form");
    if (mod_reduce(q.a, lv.N) != 0)
        throw std::invalid_argument("elliptic_eisenstein: N must divide the leading coefficient");
    if (!(s.re > 1))
        throw std::domain_error("elliptic_eisenstein: need Re(s) > 1");
    if (!(bound > 0))
        throw std::invalid_argument("elliptic_eisenstein: bound must be positive");

    const T am = from_rational<T>(Rational(-D, 4 * lv.N));  // |m|
    const T cap = am * bound * bound;
    const T inner_cap = cap / 4;
    const T singular = am * T(1e-24);
    const cplx<T> mhalf_s{-s.re / 2, -s.im / 2};
    cplx<T> total{}, outer{};
    detail::for_each_lattice_form(lv, q.b, D, z, cap, [&](const BinaryQF& g, const T& maj) {
        if (!gamma0_equivalent(lv.N, q, g)) return;
        if (maj < singular)
            throw std::domain_error("elliptic_eisenstein: z lies in the orbit of the CM point");
        const cplx<T> term = detail::pow_pc(maj / am, mhalf_s);
        total += term;
        if (maj > inner_cap) outer += term;
    });
    TruncatedSum<T> out;
    out.value = total;
    out.bound = bound;
    out.est_tail = detail::geometric_tail(abs(outer), s.re - 1);
    return out;
}

// The majorant lattice sum 2 Gamma(s) (4 pi)^{-s} sum_X q_z(X)^{-s} over the
// nonzero X in L(beta, m), truncated at q_z(X) <= norm_bound.  The number of
// lattice points with majorant below K grows like sqrt(K), so the terms of
// the truncated tail decay like norm_bound^{1/2 - s}.
template <typename T>
TruncatedSum<T> lattice_sum(const Level& lv, i64 beta, const Rational& m,
                            const cplx<T>& z, const cplx<T>& s, const T& norm_bound) {
    using std::abs;
    Rational d4 = m * 4 * lv.N;
    if (boost::multiprecision::denominator(d4) != 1)
        throw std::invalid_argument("lattice_sum: 4Nm must be an integer");
    const i64 D = static_cast<i64>(boost::multiprecision::numerator(d4));
    if (!(s.re > 1))
        throw std::domain_error("lattice_sum: need Re(s) > 1");
    if (!(norm_bound > 0))
        throw std::invalid_argument("lattice_sum: norm_bound must be positive");

    const T singular = T(1e-24) * (T(1) + abs(from_rational<T>(m)));
    const T inner = norm_bound / 2;
    const cplx<T> ms = -s;
    cplx<T> total{}, outer{};
    detail::for_each_lattice_form(lv, beta, D, z, norm_bound,
                                  [&](const BinaryQF&, const T& maj) {
        if (maj < singular)
            throw std::domain_error("lattice_sum: z lies on the singular locus of the lattice");
        const cplx<T> term = detail::pow_pc(maj, ms);
        total += term;
        if (maj > inner) outer += term;
    });
    const cplx<T> pref = T(2) * gamma_c(s) * detail::pow_pc(T(4) * pi<T>(), ms);
    TruncatedSum<T> out;
    out.value = pref * total;
    out.bound = norm_bound;
    out.est_tail = abs(pref) * detail::geometric_tail(abs(outer), s.re - T(1) / 2);
    return out;
}

// lattice_sum with its leading power tail removed by Richardson
// extrapolation: the sum is evaluated at bounds R, 2R, 4R, the tail model
// S(inf) - S(B) ~ a B^{1/2 - Re s} is solved on consecutive pairs, and the
// spread of the two extrapolants is reported as est_tail.
template <typename T>
TruncatedSum<T> lattice_sum_extrapolated(const Level& lv, i64 beta, const Rational& m,
                                         const cplx<T>& z, const cplx<T>& s,
                                         const T& norm_bound) {
    using std::pow;
    const TruncatedSum<T> s1 = lattice_sum(lv, beta, m, z, s, norm_bound);
    const TruncatedSum<T> s2 = lattice_sum(lv, beta, m, z, s, 2 * norm_bound);
    const TruncatedSum<T> s3 = lattice_sum(lv, beta, m, z, s, 4 * norm_bound);
    const T q = pow(T(2), T(1) / 2 - s.re);
    const T w = q / (T(1) - q);
    const cplx<T> e1 = s2.value + (s2.value - s1.value) * w;
    const cplx<T> e2 = s3.value + (s3.value - s2.value) * w;
    TruncatedSum<T> out;
    out.value = e2;
    out.bound = 4 * norm_bound;
    out.est_tail = abs(e2 - e1);
    return out;
}

// The Eisenstein-series side of the lattice sum decomposition, per sign of m:
//
//   m > 0:  2 Gamma(s) (4 pi m)^{-s}    sum over classes of L(beta, m) of
//           the hyperbolic series at 2s,
//   m = 0:  4 (N/pi)^s Gamma(s) zeta(2s) sum over cusps 1/c of the parabolic
//           series at 2s  (the zeta factor collects the imprimitive
//           multiples of each primitive isotropic vector),
//   m < 0:  2 Gamma(s) (4 pi |m|)^{-s}  sum over the positive definite
//           classes of both L(beta, m) and L(-beta, m) of the elliptic
//           series at 2s  (the negative definite classes of L(beta, m) share
//           CM points with the positive definite classes of L(-beta, m)).
//
// Truncations are derived from norm_bound so that every constituent series
// is cut at the same majorant height as lattice_sum(..., norm_bound).
template <typename T>
TruncatedSum<T> averaged_eisenstein_side(const Level& lv, i64 beta, const Rational& m,
                                         const cplx<T>& z, const cplx<T>& s,
                                         const T& norm_bound) {
    using std::sqrt;
    Rational d4 = m * 4 * lv.N;
    if (boost::multiprecision::denominator(d4) != 1)
        throw std::invalid_argument("averaged_eisenstein_side: 4Nm must be an integer");
    const i64 D = static_cast<i64>(boost::multiprecision::numerator(d4));
    if (!(s.re > 1))
        throw std::domain_error("averaged_eisenstein_side: need Re(s) > 1");
    if (!(norm_bound > 0))
        throw std::invalid_argument("averaged_eisenstein_side: norm_bound must be positive");
    const cplx<T> two_s = s * T(2);
    const cplx<T> ms = -s;

    if (m == 0) {
        if (mod_reduce(beta, 2 * lv.N) != 0)
            throw std::invalid_argument("averaged_eisenstein_side: m = 0 needs beta = 0");
        cplx<T> acc{};
        T tails{};
        for (i64 c : lv.divs) {
            // primitive isotropic majorant (1/4N) Im(local z)^{-2} <= norm_bound
            const T hb = sqrt(T(c) / T(lv.N) * z.im * sqrt(T(4 * lv.N) * norm_bound));
            const auto e = parabolic_eisenstein(lv, c, z, two_s, hb);
            acc += e.value;
            tails += e.est_tail;
        }
        const cplx<T> pref = T(4) * detail::pow_pc(T(lv.N) / pi<T>(), s) * gamma_c(s) *
                             riemann_zeta(two_s);
        return {pref * acc, norm_bound, abs(pref) * tails};
    }

    if (D > 0) {
        const T mv = from_rational<T>(m);
        const T bnd = sqrt(norm_bound / mv);
        if (!(bnd >= 1))
            throw std::invalid_argument("averaged_eisenstein_side: norm_bound below the minimal majorant");
        const ClassList cl = enumerate_classes(lv.N, beta, D);
        cplx<T> acc{};
        T tails{};
        for (const auto& c : cl.classes) {
            const auto e = hyperbolic_eisenstein(lv, c.form, z, two_s, bnd);
            acc += e.value;
            tails += e.est_tail;
        }
        const cplx<T> pref = T(2) * gamma_c(s) * detail::pow_pc(T(4) * pi<T>() * mv, ms);
        return {pref * acc, norm_bound, abs(pref) * tails};
    }

    const T av = from_rational<T>(-m);
    const T bnd = sqrt(norm_bound / av);
    const ClassList pos = enumerate_classes(lv.N, beta, D);
    const ClassList neg = enumerate_classes(lv.N, -beta, D);
    cplx<T> acc{};
    T tails{};
    for (const ClassList* L : {&pos, &neg})
        for (const auto& c : L->classes) {
            const auto e = elliptic_eisenstein(lv, c.form, z, two_s, bnd);
            acc += e.value;
            tails += e.est_tail;
        }
    const cplx<T> pref = T(2) * gamma_c(s) * detail::pow_pc(T(4) * pi<T>() * av, ms);
    return {pref * acc, norm_bound, abs(pref) * tails};
}

// ---------------------------------------------------------------------------
// Hyperbolic distances (convenience wrappers over the exact kernels)
// ---------------------------------------------------------------------------

// Distance between two points of the upper half plane.
template <typename T>
T hyperbolic_distance(const cplx<T>& z, const cplx<T>& w) {
    using std::acosh;
    const T c = cosh_dist(z, w);
    if (!(c > 1)) return T(0);  // clamp roundoff below the diagonal
    return acosh(c);
}

// Distance from z to the geodesic of an indefinite form (disc > 0).
template <typename T>
T hyperbolic_distance_to_geodesic(const BinaryQF& q, const cplx<T>& z) {
    using std::asinh;
    return asinh(sinh_dist_geodesic<T>(q, z));
}

}  // namespace eisenkron
