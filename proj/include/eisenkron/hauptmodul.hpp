#pragma once

// Modular functions of genus-zero Fricke groups Gamma_0^*(N), N squarefree:
//  * numeric Dedekind eta on H via modular reduction + pentagonal series
//  * eta quotients: point evaluation and Ligozat cusp orders
//  * search for the eta-quotient generator of the function field of
//    Gamma_0(N) with divisor (zero cusp) - (cusp infinity)
//  * the normalized hauptmodul j_N^* = q^{-1} + 0 + O(q) of Gamma_0^*(N),
//    assembled from the generator and its Atkin-Lehner translates, both as an
//    exact q-expansion and as an evaluator on H
//  * continued-fraction snapping of numeric constants to rationals
//
// Supported hauptmodul levels are those squarefree N for which the generator
// search succeeds: N in {1, 2, 3, 5, 6, 7, 10, 13} (level 1 goes through
// E_4^3 / Delta).  Other levels throw.

#include "qseries.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <array>
#include <optional>

namespace eisenkron {

namespace detail {

/// Integer power by repeated squaring; negative exponents via one division.
template <class T>
cplx<T> cpow_i(const cplx<T>& base, i64 e) {
    bool neg = e < 0;
    u64 k = neg ? static_cast<u64>(-e) : static_cast<u64>(e);
    cplx<T> acc(T(1)), b = base;
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return neg ? cplx<T>(T(1)) / acc : acc;
}

/// eta(z) for z already in (a neighbourhood of) the standard fundamental
/// domain: q^{1/24} sum_k (-1)^k q^{k(3k-1)/2} with rapidly decaying terms.
template <class T>
cplx<T> eta_pentagonal(const cplx<T>& z) {
    using std::exp;
    using std::pow;
    const T tp = two_pi<T>();
    const T eps = pow(T(10), -T(working_digits10<T>() + 5));
    cplx<T> s(T(1));
    for (i64 k = 1; k <= 10000; ++k) {
        const i64 e1 = k * (3 * k - 1) / 2;
        const i64 e2 = k * (3 * k + 1) / 2;
        const T sign = (k % 2) ? T(-1) : T(1);
        const cplx<T> t1 = polar(exp(-tp * z.im * T(e1)), tp * z.re * T(e1));
        const cplx<T> t2 = polar(exp(-tp * z.im * T(e2)), tp * z.re * T(e2));
        s += sign * (t1 + t2);
        if (exp(-tp * z.im * T(e1)) < eps) break;
    }
    return polar(exp(-tp * z.im / T(24)), tp * z.re / T(24)) * s;
}

} // namespace detail

/// Dedekind eta at any z in the upper half plane, full working precision.
/// Reduction uses eta(z+1) = e(1/24) eta(z) and eta(-1/z) = sqrt(-iz) eta(z).
template <class T>
cplx<T> dedekind_eta(cplx<T> z) {
    using std::exp;
    using std::floor;
    using std::round;
    if (!(z.im > T(0))) throw std::invalid_argument("dedekind_eta: Im z must be positive");
    cplx<T> f(T(1));
    bool reduced = false;
    for (int it = 0; it < 20000 && !reduced; ++it) {
        T n = round(z.re);
        if (n != T(0)) {
            z.re -= n;
            T nm = n - T(24) * floor(n / T(24));  // phase only needs n mod 24
            f *= unit_exp(nm / T(24));
        }
        if (norm(z) >= T(1)) {
            reduced = true;
        } else {
            cplx<T> w = cplx<T>(T(-1)) / z;
            f *= sqrt(cplx<T>(w.im, -w.re));  // sqrt(-i w)
            z = w;
        }
    }
    if (!reduced) throw std::runtime_error("dedekind_eta: reduction did not terminate");
    return f * detail::eta_pentagonal(z);
}

/// prod_d eta(d z)^{r_d} at a point of H.
template <class T>
cplx<T> eta_quotient_value(const std::map<i64, i64>& exps, const cplx<T>& z) {
    cplx<T> acc(T(1));
    for (const auto& [d, r] : exps) {
        if (r == 0) continue;
        acc *= detail::cpow_i(dedekind_eta(z * T(d)), r);
    }
    return acc;
}

/// Order of prod_d eta(d z)^{r_d} at the cusp 1/c of Gamma_0(N) (squarefree
/// N, c | N), in the local parameter of width N/c:
///   (N/24) sum_d gcd(c,d)^2 r_d / (c d).
inline Rational eta_quotient_cusp_order(i64 N, const std::map<i64, i64>& exps, i64 c) {
    if (c <= 0 || N % c != 0)
        throw std::invalid_argument("eta_quotient_cusp_order: c must divide N");
    Rational acc(0);
    for (const auto& [d, r] : exps) {
        if (N % d != 0) throw std::invalid_argument("eta_quotient_cusp_order: d must divide N");
        i64 g = std::gcd(c, d);
        acc += Rational(g * g * r, c * d);
    }
    return acc * Rational(N, 24);
}

/// Integer matrix [[Q u, -v], [N, Q]] of determinant Q (u Q + v N/Q = 1)
/// representing the Atkin-Lehner involution w_Q on Gamma_0(N).
struct AtkinLehnerMap {
    i64 N, Q;
    i64 a, b, c, d;

    AtkinLehnerMap(i64 N_, i64 Q_) : N(N_), Q(Q_) {
        Level lv(N_);
        (void)lv;
        if (Q_ <= 0 || N_ % Q_ != 0)
            throw std::invalid_argument("AtkinLehnerMap: Q must divide N");
        i64 u = 0, v = 0;
        if (ext_gcd(Q_, N_ / Q_, u, v) != 1)
            throw std::runtime_error("AtkinLehnerMap: levels not coprime");
        a = Q_ * u;
        b = -v;
        c = N_;
        d = Q_;
    }

    template <class T>
    cplx<T> apply(const cplx<T>& z) const {
        return (T(a) * z + T(b)) / (T(c) * z + T(d));
    }
};

namespace detail {

/// All eta-quotient exponent vectors on Gamma_0(N) that give a weight-0
/// quotient with trivial character, a simple pole at the cusp infinity and
/// nonnegative integral orders elsewhere; sorted lexicographically.
inline std::vector<std::vector<i64>> hauptmodul_candidates(i64 N) {
    Level lv(N);
    const auto& D = lv.divs;
    const i64 B = 24;
    std::vector<std::vector<i64>> found;
    auto admit = [&](const std::vector<i64>& rv) {
        std::map<i64, i64> r;
        for (size_t i = 0; i < D.size(); ++i)
            if (rv[i] != 0) r[D[i]] = rv[i];
        for (const auto& pe : factor(N)) {
            i64 par = 0;
            for (const auto& [dd, rr] : r)
                if (dd % pe.first == 0) par += rr;
            if (par % 2 != 0) return;  // quotient of d^{r_d} must be a square
        }
        for (i64 c : D) {
            if (c == N) continue;
            Rational o = eta_quotient_cusp_order(N, r, c);
            if (denominator(o) != 1 || o < 0) return;
        }
        found.push_back(rv);
    };
    if (D.size() == 2) {
        // r0 + r1 = 0 and r0 + N r1 = -24 force r0 = 24/(N-1)
        if (24 % (N - 1) == 0 && 24 / (N - 1) <= B)
            admit({24 / (N - 1), -24 / (N - 1)});
    } else if (D.size() == 4) {
        const i64 d2 = D[2], d3 = D[3];
        for (i64 r0 = -B; r0 <= B; ++r0)
            for (i64 r1 = -B; r1 <= B; ++r1) {
                const i64 S = -r0 - r1;
                const i64 Tt = -24 - D[0] * r0 - D[1] * r1;
                const i64 num = Tt - d2 * S;
                if (num % (d3 - d2) != 0) continue;
                const i64 r3 = num / (d3 - d2);
                const i64 r2 = S - r3;
                if (std::abs(r2) <= B && std::abs(r3) <= B) admit({r0, r1, r2, r3});
            }
    }
    std::sort(found.begin(), found.end());
    return found;
}

/// 1/sqrt(prod_d d^{r_d}) as an exact rational (requires the product to be a
/// perfect square); this is the multiplier of the full involution w_N.
inline Rational fricke_eta_multiplier(const std::map<i64, i64>& exps) {
    std::map<i64, i64> pe;
    for (const auto& [d, r] : exps)
        for (const auto& [p, e] : factor(d)) pe[p] += e * r;
    Rational lam(1);
    for (const auto& [p, e] : pe) {
        if (e % 2 != 0)
            throw std::invalid_argument("fricke_eta_multiplier: product is not a square");
        const i64 h = -e / 2;
        using boost::multiprecision::pow;
        Integer pw = pow(Integer(p), static_cast<unsigned>(h >= 0 ? h : -h));
        lam *= (h >= 0) ? Rational(pw) : Rational(1, pw);
    }
    return lam;
}

} // namespace detail

/// True when the hauptmodul construction below is available at level N.
inline bool fricke_hauptmodul_available(i64 N) {
    if (N <= 0 || !is_squarefree(N)) return false;
    if (N == 1) return true;
    if (Level(N).sigma0() > 4) return false;
    return !detail::hauptmodul_candidates(N).empty();
}

/// The eta-quotient generator of the modular function field of Gamma_0(N)
/// with a simple pole at infinity (lexicographically smallest exponents).
inline std::map<i64, i64> gamma0_hauptmodul_exponents(i64 N) {
    Level lv(N);
    if (N == 1)
        throw std::invalid_argument("gamma0_hauptmodul_exponents: level 1 has no eta quotient generator");
    if (lv.sigma0() > 4)
        throw std::invalid_argument("gamma0_hauptmodul_exponents: more than two prime factors unsupported");
    auto cands = detail::hauptmodul_candidates(N);
    if (cands.empty())
        throw std::invalid_argument("gamma0_hauptmodul_exponents: no generator at this level");
    std::map<i64, i64> out;
    for (size_t i = 0; i < lv.divs.size(); ++i)
        if (cands.front()[i] != 0) out[lv.divs[i]] = cands.front()[i];
    return out;
}

/// Best rational approximation p/q of x with q <= max_den and |x - p/q| <= tol
/// (continued-fraction convergents); nullopt when no convergent certifies.
inline std::optional<Rational> rationalize(const Real& x, const Integer& max_den, const Real& tol) {
    using std::abs;
    using std::floor;
    Integer p0 = 1, q0 = 0;
    Real v = x;
    Integer a = floor(v).convert_to<Integer>();
    Integer p1 = a, q1 = 1;
    for (int it = 0; it < 300; ++it) {
        Rational cand(p1, q1);
        if (abs(x - from_rational<Real>(cand)) <= tol) return cand;
        Real frac = v - from_rational<Real>(Rational(a));
        if (!(frac > 0)) break;
        v = 1 / frac;
        a = floor(v).convert_to<Integer>();
        Integer p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    Rational cand(p1, q1);
    if (abs(x - from_rational<Real>(cand)) <= tol) return cand;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// The normalized hauptmodul of Gamma_0^*(N)
// ---------------------------------------------------------------------------

/// j_N^*(z) = q^{-1} + 0 + O(q), invariant under Gamma_0(N) and all
/// Atkin-Lehner involutions.  For N > 1 it is assembled as
///   sum_{Q | N} t(W_Q z) - c_0 = sum_{Q | N} kappa_Q g_Q(z) - c_0,
/// where t is the Gamma_0(N) generator, g_Q carries the star-permuted
/// exponents r_{Q * d}, and the scalar multipliers kappa_Q are snapped to
/// exact rationals from high-precision values and re-validated at independent
/// points.  For N = 1 it is E_4^3/Delta minus its constant term.
class FrickeHauptmodul {
  public:
    explicit FrickeHauptmodul(i64 N) : lv_(N) {
        if (!fricke_hauptmodul_available(N))
            throw std::invalid_argument("FrickeHauptmodul: unsupported level");
        if (N > 1) {
            base_ = gamma0_hauptmodul_exponents(N);
            for (i64 Q : lv_.divs) {
                std::map<i64, i64> g;
                for (i64 d : lv_.divs) {
                    auto it = base_.find(star(Q, d));
                    if (it != base_.end() && it->second != 0) g[d] = it->second;
                }
                star_exps_[Q] = g;
            }
            snap_multipliers_();
        }
        constant_ = raw_series_(4).ser[1];
    }

    i64 level() const { return lv_.N; }
    const Rational& additive_constant() const { return constant_; }
    const std::map<i64, i64>& base_exponents() const { return base_; }
    const std::map<i64, Rational>& multipliers() const { return mult_; }

    /// q^{-1} + 0 + c_1 q + ... + c_{order-1} q^{order-1}, exact.
    FracSeries series(int order) const {
        if (order < 2) throw std::invalid_argument("FrickeHauptmodul::series: order too small");
        FracSeries f = raw_series_(order);
        f.ser.set(1, f.ser[1] - constant_);
        return f;
    }

    template <class T>
    cplx<T> value(const cplx<T>& z) const {
        if (lv_.N == 1) return level_one_value_(z);
        cplx<T> acc(T(0));
        for (const auto& [Q, kappa] : mult_)
            acc += from_rational<T>(kappa) * eta_quotient_value<T>(star_exps_.at(Q), z);
        return acc - from_rational<T>(constant_);
    }

  private:
    FracSeries raw_series_(int order) const {
        if (lv_.N == 1) {
            PowerSeries e4 = PowerSeries::one(order);
            for (int n = 1; n <= order; ++n) e4.set(n, Rational(240) * Rational(sigma(n, 3)));
            PowerSeries num = e4 * e4 * e4;
            PowerSeries dinv = eta_product_part(1, order).pow(24).inverse();
            return {Rational(-1), num * dinv};
        }
        FracSeries t = eta_quotient(base_, order);
        if (t.rho != Rational(-1))
            throw std::runtime_error("FrickeHauptmodul: generator must have a simple pole");
        PowerSeries P = t.ser;
        for (const auto& [Q, kappa] : mult_) {
            if (Q == 1) continue;
            FracSeries g = eta_quotient(star_exps_.at(Q), order);
            if (denominator(g.rho) != 1 || g.rho < 0)
                throw std::runtime_error("FrickeHauptmodul: translate has a fractional order");
            const i64 k = static_cast<i64>(numerator(g.rho));
            for (int n = static_cast<int>(k) + 1; n <= order; ++n)
                P.set(n, P[n] + kappa * g.ser[n - 1 - static_cast<int>(k)]);
        }
        return {Rational(-1), P};
    }

    template <class T>
    cplx<T> level_one_value_(cplx<T> z) const {
        using std::exp;
        using std::pow;
        using std::round;
        if (!(z.im > T(0)))
            throw std::invalid_argument("FrickeHauptmodul::value: Im z must be positive");
        for (int it = 0; it < 20000; ++it) {
            z.re -= round(z.re);
            if (norm(z) >= T(1)) break;
            z = cplx<T>(T(-1)) / z;
        }
        const T tp = two_pi<T>();
        const T eps = pow(T(10), -T(detail::working_digits10<T>() + 5));
        cplx<T> e4(T(1));
        for (i64 n = 1; n <= 10000; ++n) {
            const T mag = exp(-tp * z.im * T(n));
            e4 += T(240) * T(sigma(n, 3)) * polar(mag, tp * z.re * T(n));
            if (mag * T(n * n * n) < eps) break;
        }
        const cplx<T> dd = detail::cpow_i(detail::eta_pentagonal(z), 24);
        return e4 * e4 * e4 / dd - from_rational<T>(constant_);
    }

    /// Determine kappa_Q from t(W_Q z)/g_Q(z) at one point, snap to a
    /// rational, and re-validate at further points.
    void snap_multipliers_() {
        const int dig = detail::working_digits10<Real>();
        detail::precision_scope<Real> ps(dig < 50 ? 55 - dig : 5);
        const std::array<std::array<int, 2>, 3> pts = {{{137, 809}, {-211, 1303}, {43, 617}}};
        mult_[1] = Rational(1);
        for (i64 Q : lv_.divs) {
            if (Q == 1) continue;
            AtkinLehnerMap w(lv_.N, Q);
            Rational snapped(0);
            for (size_t p = 0; p < pts.size(); ++p) {
                cplx<Real> z(Real(pts[p][0]) / 1000, Real(pts[p][1]) / 1000);
                cplx<Real> ratio = eta_quotient_value<Real>(base_, w.apply(z)) /
                                   eta_quotient_value<Real>(star_exps_.at(Q), z);
                using std::abs;
                using std::pow;
                const Real tol = pow(Real(10), -30) * (abs(ratio) + 1);
                if (!(abs(ratio.im) <= tol))
                    throw std::runtime_error("FrickeHauptmodul: involution multiplier not real");
                if (p == 0) {
                    auto r = rationalize(ratio.re, Integer(1000000000), tol);
                    if (!r || *r == 0)
                        throw std::runtime_error("FrickeHauptmodul: multiplier is not rational");
                    snapped = *r;
                }
                if (!(abs(ratio.re - from_rational<Real>(snapped)) <= tol))
                    throw std::runtime_error("FrickeHauptmodul: multiplier validation failed");
            }
            mult_[Q] = snapped;
        }
        // the full involution's multiplier is known in closed form
        if (mult_.at(lv_.N) != detail::fricke_eta_multiplier(base_))
            throw std::runtime_error("FrickeHauptmodul: w_N multiplier mismatch");
    }

    Level lv_;
    std::map<i64, i64> base_;
    std::map<i64, std::map<i64, i64>> star_exps_;
    std::map<i64, Rational> mult_;
    Rational constant_{0};
};

} // namespace eisenkron
