#pragma once

// Selberg-type vector-valued Poincare series of weight 1/2 attached to the
// discriminant module of level N:
//
//   P_{beta,m}(tau, s) = (1/2) sum over cosets of the translation subgroup
//                        of v^s e(m tau) e_beta slashed by the coset,
//
// for beta in Z/2N, m in Q(beta) + Z, convergent for Re(s) > 3/4.  This
// header provides
//
//   * poincare_direct            -- truncated coset sum over bottom rows,
//   * poincare_fourier           -- a single Fourier coefficient b(gamma, n; v, s)
//                                   via Kloosterman zeta ladders and Whittaker
//                                   functions, with a remainder estimate,
//   * FourierCoefficientTable    -- all coefficients |n| <= n_max with the
//                                   zeta ladders cached (immutable after
//                                   construction, safe for concurrent reads),
//   * poincare_special_value     -- the holomorphic identification of the
//                                   series at s = 3/4 as a rational
//                                   combination of unary theta functions,
//   * vq_poincare_identity_check -- the exact index-raising identity relating
//                                   levels N and N/q through the operator V_q.

#include "eisenkron/core.hpp"
#include "eisenkron/numtheory.hpp"
#include "eisenkron/discgroup.hpp"
#include "eisenkron/weilrep.hpp"
#include "eisenkron/qseries.hpp"
#include "eisenkron/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace eisenkron {

/// Index (beta, m) of a Poincare series; m must lie in Q(beta) + Z.
struct PoincareIndex {
    i64 beta = 0;
    Rational m;
};

/// A vector in the group ring C[Z/2N]: component gamma at position
/// gamma mod 2N.
template <class T>
using GroupRingVector = std::vector<cplx<T>>;

namespace detail {

template <class T>
inline double as_double(const T& x) {
    if constexpr (std::is_same_v<T, double>) return x;
    else return x.template convert_to<double>();
}

/// Accumulate the coset term of the bottom row (c, d), gcd(c, d) = 1, scaled
/// by `weight`, into `acc`:  weight * phi(tau)^{-1} rho(M~)^{-1} [v^s e(m .)]
/// evaluated at M tau, where M = [[p, -q], [c, d]] is the unimodular
/// completion with p d + q c = 1 and M~ its standard metaplectic lift.
template <class T>
void poincare_add_row(const WeilRep& rep, i64 beta, const T& m, const cplx<T>& tau,
                      const cplx<T>& s, i64 c, i64 d, const T& weight,
                      GroupRingVector<T>& acc) {
    using std::exp;
    using std::log;
    i64 p, q;
    if (ext_gcd(d, c, p, q) != 1)
        throw std::invalid_argument("poincare_add_row: row must be coprime");
    Mp2 mt{SL2(p, -q, c, d), 1};
    const cplx<T> jtau{T(c) * tau.re + T(d), T(c) * tau.im};
    const cplx<T> w = cplx<T>{T(p) * tau.re - T(q), T(p) * tau.im} / jtau;
    const T lv = log(w.im);
    cplx<T> scal = eisenkron::exp(cplx<T>{s.re * lv, s.im * lv});  // Im(M tau)^s
    scal *= unit_exp(m * w.re);                                    // e(m Re(M tau))
    scal *= exp(-two_pi<T>() * m * w.im);
    scal /= eisenkron::sqrt(jtau);                                 // phi(tau)^{-1}
    scal *= weight;
    const Mp2 minv = mp2_inv(mt);
    for (i64 g = 0; g < rep.dim(); ++g)
        acc[size_t(g)] += scal * rep.entry<T>(minv, g, beta);
}

}  // namespace detail

/// Truncated coset sum for P_{beta,m}(tau, s), Re(s) > 3/4.  Bottom rows
/// (c, d) are kept inside the disc (c u* + d)^2 + (c v*)^2 <= R^2 with
/// R = height_bound, and weighted by a linear taper on radius [R/2, R] (the
/// tapered partial sums converge like R^{-3/2}; sharp cutoffs only like
/// R^{-1/2}).  The centre (u*, v*) is tau snapped to the half-integer grid
/// (v* >= 1/2), so the row set and weights are locked across nearby tau:
/// finite-difference stencils see one fixed truncation, and the truncation
/// commutes exactly with tau -> tau + 1 and, at tau = i, with tau -> -1/tau.
/// Row selection and weights are computed in double precision regardless of
/// T, so evaluations at different precisions agree on the term set.
template <class T>
GroupRingVector<T> poincare_direct(const WeilRep& rep, const PoincareIndex& idx,
                                   const cplx<T>& tau, const cplx<T>& s,
                                   i64 height_bound) {
    if (!(tau.im > T(0)))
        throw std::domain_error("poincare_direct: tau must lie in the upper half-plane");
    if (!(s.re > T(3) / 4))
        throw std::domain_error("poincare_direct: need Re(s) > 3/4");
    if (height_bound < 2)
        throw std::invalid_argument("poincare_direct: height bound must be >= 2");
    rep.check_index(idx.beta, idx.m);
    const i64 beta = rep.norm_index(idx.beta);
    const T mval = from_rational<T>(idx.m);

    const double R = double(height_bound);
    const double us = std::round(2.0 * detail::as_double(tau.re)) / 2.0;
    const double vs = std::max(0.5, std::round(2.0 * detail::as_double(tau.im)) / 2.0);

    GroupRingVector<T> acc(size_t(rep.dim()));
    const i64 cmax = i64(std::floor(R / vs));
    for (i64 c = -cmax; c <= cmax; ++c) {
        const double rowh = double(c) * vs;
        const double halfw2 = R * R - rowh * rowh;
        if (halfw2 < 0) continue;
        const double halfw = std::sqrt(halfw2);
        const double x0 = double(c) * us;
        const i64 dlo = i64(std::ceil(-x0 - halfw));
        const i64 dhi = i64(std::floor(-x0 + halfw));
        for (i64 d = dlo; d <= dhi; ++d) {
            if (std::gcd(c, d) != 1) continue;
            const double x = double(c) * us + double(d);
            const double r = std::sqrt(x * x + rowh * rowh);
            const double w = std::min(1.0, (R - r) / (R / 2));
            if (!(w > 0)) continue;
            detail::poincare_add_row(rep, beta, mval, tau, s, c, d, T(w), acc);
        }
    }
    return acc;
}

namespace detail {

/// Truncations of Z(s0 + j) = sum_{c != 0} |c|^{1 - 2(s0 + j)} H_c(beta, m, gamma, n)
/// for j = 0..jmax and each target (gamma, n), sharing the Kloosterman sums
/// H_c across the whole ladder and all targets.  Requires s0 > 1.  Tail
/// bounds follow the integral comparison used by kloosterman_zeta.
template <class T>
std::vector<std::vector<TailBounded<T>>> zeta_ladders(const WeilRep& rep, i64 beta,
                                                      const Rational& m,
                                                      const std::vector<FourierIndex>& targets,
                                                      const T& s0, int jmax, i64 cutoff) {
    using std::pow;
    if (!(s0 > T(1))) throw std::domain_error("zeta_ladders: need s0 > 1");
    if (jmax < 0) throw std::invalid_argument("zeta_ladders: negative ladder length");
    if (cutoff < 1) throw std::invalid_argument("zeta_ladders: cutoff must be >= 1");
    const size_t nt = targets.size();
    std::vector<std::vector<cplx<T>>> acc(nt, std::vector<cplx<T>>(size_t(jmax) + 1));
    for (i64 C = 1; C <= cutoff; ++C) {
        const auto hp = kloosterman_h_batch<T>(rep, C, beta, m, targets);
        const auto hm = kloosterman_h_batch<T>(rep, -C, beta, m, targets);
        const T base = pow(T(C), T(1) - 2 * s0);
        const T step = T(1) / (T(C) * T(C));
        for (size_t t = 0; t < nt; ++t) {
            const cplx<T> h = hp[t] + hm[t];
            T wj = base;
            for (int j = 0; j <= jmax; ++j) {
                acc[t][size_t(j)] += h * wj;
                wj *= step;
            }
        }
    }
    std::vector<std::vector<TailBounded<T>>> out(nt);
    for (size_t t = 0; t < nt; ++t) {
        out[t].reserve(size_t(jmax) + 1);
        for (int j = 0; j <= jmax; ++j) {
            const T re2 = T(2) * (s0 + T(j)) - T(2);
            const T tail = T(2) * pow(T(cutoff), -re2) / re2;
            out[t].push_back({acc[t][size_t(j)], tail});
        }
    }
    return out;
}

/// Assemble b(gamma, n; v, s) from a zeta ladder Z[j] ~ Z(1/4 + s + j).
/// The reported tail combines the ladder tails (weighted by the term
/// prefactors) with a geometric estimate for the truncated j-series; the
/// latter is an estimate, not a proven bound, and the caller should grow
/// j_cutoff until it stabilises.
template <class T>
TailBounded<T> assemble_b(const Rational& m, const Rational& n, const T& v, const T& s,
                          const std::vector<TailBounded<T>>& Z) {
    using std::abs;
    using std::exp;
    using std::pow;
    using std::sqrt;
    const int jmax = int(Z.size()) - 1;
    const T mval = from_rational<T>(m);
    const T pi_ = pi<T>();
    cplx<T> total{};
    T errz(0);
    std::vector<T> mags;
    if (n == 0) {
        const T pref = pow(T(2), T(3) / 2 - 2 * s) * pi_ * pow(v, T(1) / 2 - s) / gamma_r(s);
        T geom(1);  // (-pi m / v)^j / j!
        for (int j = 0; j <= jmax; ++j) {
            if (j > 0) geom *= (-pi_ * mval / v) / T(j);
            const T cj = pref * geom * gamma_r(2 * s - T(1) / 2 + T(j)) /
                         gamma_r(s + T(1) / 2 + T(j));
            total += Z[size_t(j)].value * cj;
            errz += abs(cj) * Z[size_t(j)].tail;
            mags.push_back(abs(cj) * eisenkron::abs(Z[size_t(j)].value));
            if (m == 0) break;
        }
    } else {
        const T na = abs(from_rational<T>(n));
        const T x = 4 * pi_ * na * v;
        const T pref = sqrt(T(2)) * pow(pi_, s + T(1) / 2) * pow(na, s - T(1) / 2);
        T geom(1);  // (-4 pi^2 |n| m)^j / j!
        for (int j = 0; j <= jmax; ++j) {
            if (j > 0) geom *= (T(-4) * pi_ * pi_ * na * mval) / T(j);
            T wf = pow(x, -T(1) / 4 - T(j) / 2);
            if (n > 0)
                wf *= whittaker_w(T(1) / 4 + T(j) / 2, s - T(1) / 4 + T(j) / 2, x) /
                      gamma_r(s + T(1) / 2 + T(j));
            else
                wf *= whittaker_w(-T(1) / 4 - T(j) / 2, s - T(1) / 4 + T(j) / 2, x) /
                      gamma_r(s);
            const T cj = pref * geom * wf;
            total += Z[size_t(j)].value * cj;
            errz += abs(cj) * Z[size_t(j)].tail;
            mags.push_back(abs(cj) * eisenkron::abs(Z[size_t(j)].value));
            if (m == 0) break;
        }
    }
    T jrem(0);
    if (m != 0) {
        if (mags.size() >= 4) {
            // Pair consecutive magnitudes so a single near-zero term of an
            // alternating series does not fake convergence or divergence.
            const T m2 = std::max(mags[mags.size() - 1], mags[mags.size() - 2]);
            const T m1 = std::max(mags[mags.size() - 3], mags[mags.size() - 4]);
            if (m1 > T(0) && m2 < m1) {
                const T r = sqrt(m2 / m1);
                jrem = T(2) * m2 * r / (T(1) - r);
            } else {
                jrem = T(16) * std::max(m1, m2);
            }
        } else {
            for (const T& t : mags) jrem = std::max(jrem, t);
            jrem *= T(16);
        }
    }
    return {total, errz + jrem};
}

}  // namespace detail

/// Fourier coefficient b(gamma, n; v, s) of P_{beta,m}(tau, s) for real
/// s > 3/4:
///
///   n = 0:  2^{3/2-2s} pi v^{1/2-s} / Gamma(s) * sum_j (-pi m/v)^j / j!
///           * Gamma(2s - 1/2 + j)/Gamma(s + 1/2 + j) * Z(1/4 + s + j),
///   n != 0: 2^{1/2} pi^{s+1/2} |n|^{s-1/2} * sum_j (-4 pi^2 |n| m)^j / j!
///           * Z(1/4 + s + j) * [Whittaker factor], with
///           W_{1/4+j/2, s-1/4+j/2}(4 pi |n| v) (n > 0, divided by
///           Gamma(s + 1/2 + j)) or W_{-1/4-j/2, s-1/4+j/2}(4 pi |n| v)
///           (n < 0, divided by Gamma(s)), each times (4 pi |n| v)^{-1/4-j/2}.
///
/// Z is the Kloosterman zeta of the index, truncated at |c| <= c_cutoff and
/// the j-sum at j_cutoff (for m = 0 only j = 0 contributes).  The tail field
/// is the zeta tail plus a remainder estimate for the j-series.  The
/// parameter s is restricted to the real axis because the Whittaker factors
/// are evaluated through a real-argument confluent hypergeometric routine.
template <class T>
TailBounded<T> poincare_fourier(const WeilRep& rep, const PoincareIndex& idx, i64 gamma,
                                const Rational& n, const T& v, const T& s, int j_cutoff,
                                i64 c_cutoff) {
    if (!(v > T(0))) throw std::domain_error("poincare_fourier: need v > 0");
    if (!(s > T(3) / 4)) throw std::domain_error("poincare_fourier: need s > 3/4");
    if (j_cutoff < 0) throw std::invalid_argument("poincare_fourier: negative j cutoff");
    if (c_cutoff < 1) throw std::invalid_argument("poincare_fourier: c cutoff must be >= 1");
    rep.check_index(idx.beta, idx.m);
    rep.check_index(gamma, n);
    const int jmax = (idx.m == 0) ? 0 : j_cutoff;
    const auto ladders = detail::zeta_ladders<T>(rep, rep.norm_index(idx.beta), idx.m,
                                                 {{rep.norm_index(gamma), n}}, T(1) / 4 + s,
                                                 jmax, c_cutoff);
    return detail::assemble_b<T>(idx.m, n, v, s, ladders[0]);
}

/// All Fourier coefficients of P_{beta,m}(., s) with |n| <= n_max, with the
/// Kloosterman zeta ladders computed once at construction (shared across the
/// ladder and all components) and cached.  The table is immutable after
/// construction; coefficient() and evaluate() only read, so concurrent use is
/// safe.  Coefficients remain functions of v: only the v-independent zeta
/// data is frozen.
template <class T>
class FourierCoefficientTable {
public:
    FourierCoefficientTable(const WeilRep& rep, const PoincareIndex& idx, const T& s,
                            const Rational& n_max, int j_cutoff, i64 c_cutoff)
        : level_(rep.level()),
          beta_(rep.norm_index(idx.beta)),
          m_(idx.m),
          s_(s),
          n_max_(n_max) {
        if (!(s > T(3) / 4))
            throw std::domain_error("FourierCoefficientTable: need s > 3/4");
        if (j_cutoff < 0)
            throw std::invalid_argument("FourierCoefficientTable: negative j cutoff");
        if (c_cutoff < 1)
            throw std::invalid_argument("FourierCoefficientTable: c cutoff must be >= 1");
        if (n_max < 0)
            throw std::invalid_argument("FourierCoefficientTable: negative n range");
        rep.check_index(beta_, m_);
        const i64 n2 = rep.dim();
        const double nmd = detail::as_double(from_rational<double>(n_max));
        for (i64 g = 0; g < n2; ++g) {
            const Rational qg(g * g, 4 * level_);
            const double qd = from_rational<double>(qg);
            const i64 klo = i64(std::floor(-nmd - qd)) - 1;
            const i64 khi = i64(std::ceil(nmd - qd)) + 1;
            for (i64 k = klo; k <= khi; ++k) {
                const Rational n = qg + k;
                if (n > n_max || -n > n_max) continue;
                targets_.push_back({g, n});
            }
        }
        const int jmax = (m_ == 0) ? 0 : j_cutoff;
        auto ladders = detail::zeta_ladders<T>(rep, beta_, m_, targets_, T(1) / 4 + s,
                                               jmax, c_cutoff);
        for (size_t t = 0; t < targets_.size(); ++t)
            ladders_.emplace(key(targets_[t].gamma, targets_[t].n), std::move(ladders[t]));
    }

    i64 level() const { return level_; }
    PoincareIndex index() const { return {beta_, m_}; }
    const T& s() const { return s_; }
    const Rational& n_range() const { return n_max_; }
    const std::vector<FourierIndex>& indices() const { return targets_; }

    /// b(gamma, n; v, s) assembled from the cached ladder; throws
    /// std::out_of_range when (gamma, n) was not tabulated.
    TailBounded<T> coefficient(i64 gamma, const Rational& n, const T& v) const {
        if (!(v > T(0)))
            throw std::domain_error("FourierCoefficientTable: need v > 0");
        const auto it = ladders_.find(key(mod_reduce(gamma, 2 * level_), n));
        if (it == ladders_.end())
            throw std::out_of_range("FourierCoefficientTable: index not tabulated");
        return detail::assemble_b<T>(m_, n, v, s_, it->second);
    }

    /// P_{beta,m}(tau, s) assembled from the expansion: the two exponential
    /// main terms plus sum_{gamma, n} b(gamma, n; v) e(n u) on each
    /// component.
    GroupRingVector<T> evaluate(const cplx<T>& tau) const {
        using std::exp;
        using std::pow;
        if (!(tau.im > T(0)))
            throw std::domain_error("FourierCoefficientTable: tau must lie in the upper half-plane");
        const T mval = from_rational<T>(m_);
        GroupRingVector<T> out(size_t(2 * level_));
        cplx<T> mainv = unit_exp(mval * tau.re) * exp(-two_pi<T>() * mval * tau.im) *
                        pow(tau.im, s_);
        out[size_t(beta_)] += mainv;
        out[size_t(mod_reduce(-beta_, 2 * level_))] += mainv;
        for (const auto& fi : targets_) {
            const TailBounded<T> b = coefficient(fi.gamma, fi.n, tau.im);
            out[size_t(fi.gamma)] += b.value * unit_exp(from_rational<T>(fi.n) * tau.re);
        }
        return out;
    }

    /// Error estimate for evaluate(): the sum of all coefficient tails plus a
    /// geometric continuation of the boundary coefficients standing in for the
    /// discarded |n| > n_max modes.  An estimate, not a proven bound.
    T evaluate_tail(const cplx<T>& tau) const {
        using std::exp;
        if (!(tau.im > T(0)))
            throw std::domain_error("FourierCoefficientTable: tau must lie in the upper half-plane");
        T tails(0), edge(0);
        const Rational margin = n_max_ - 1;
        for (const auto& fi : targets_) {
            const TailBounded<T> b = coefficient(fi.gamma, fi.n, tau.im);
            tails += b.tail;
            if (fi.n > margin || -fi.n > margin)
                edge = std::max(edge, eisenkron::abs(b.value));
        }
        T r = T(2) * exp(-two_pi<T>() * tau.im);
        const i64 comps = 2 * level_;
        if (r < T(9) / 10)
            tails += T(2 * comps) * edge * r / (T(1) - r);
        else
            tails += T(16 * comps) * edge;
        return tails;
    }

private:
    static std::pair<i64, std::pair<i64, i64>> key(i64 gamma, const Rational& n) {
        const Rational r = n;
        return {gamma, {i64(numerator(r)), i64(denominator(r))}};
    }

    i64 level_;
    i64 beta_;
    Rational m_;
    T s_;
    Rational n_max_;
    std::vector<FourierIndex> targets_;
    std::map<std::pair<i64, std::pair<i64, i64>>, std::vector<TailBounded<T>>> ladders_;
};

/// The holomorphic weight-1/2 form picked out by the Poincare series at the
/// harmonic point, together with its characterisation:
///   m > 0: a cusp form, the theta combination sum_d lambda_d theta_d when
///          4Nm is a perfect square and zero otherwise;
///   m = 0: the normalised Eisenstein average (2/sigma_0(N)) sum_c theta^{w_c};
///   m < 0: not holomorphic -- a harmonic form with principal part
///          (e_beta + e_{-beta}) e(m tau), orthogonal to cusp forms, whose
///          xi-image is cuspidal; no q-expansion is produced here.
struct PoincareSpecialValue {
    i64 level = 1;
    i64 beta = 0;
    Rational m;
    ThetaCombo combo;
    bool is_cusp_form = false;
    bool is_holomorphic = false;
    bool has_principal_part = false;
    bool orthogonal_to_cusp_forms = false;
    bool xi_image_cuspidal = true;
    bool coefficients_available = false;

    VVForm expansion(i64 cap4N) const {
        if (!coefficients_available)
            throw std::domain_error(
                "PoincareSpecialValue: no holomorphic expansion for a negative index");
        return combo.form(cap4N);
    }
};

inline PoincareSpecialValue poincare_special_value(i64 N, const PoincareIndex& idx) {
    Level lv(N);  // validates N squarefree
    WeilRep rep(N);
    rep.check_index(idx.beta, idx.m);
    PoincareSpecialValue sv;
    sv.level = N;
    sv.beta = rep.norm_index(idx.beta);
    sv.m = idx.m;
    if (idx.m < 0) {
        sv.combo = ThetaCombo{N, {}};
        sv.has_principal_part = true;
        sv.orthogonal_to_cusp_forms = true;
        sv.coefficients_available = false;
        return sv;
    }
    sv.combo = poincare_theta_combo(N, sv.beta, idx.m);
    sv.is_holomorphic = true;
    sv.coefficients_available = true;
    if (idx.m == 0) {
        sv.orthogonal_to_cusp_forms = true;
    } else {
        sv.is_cusp_form = true;
        sv.orthogonal_to_cusp_forms = sv.combo.zero();
    }
    return sv;
}

/// Report of the index-raising identity at a square index: with
/// q = gcd(n, N) and both sides expanded to scaled exponent cap4N,
///
///   P^N_{n, n^2/4N}  =  (q / sigma_1(q)) * P^{N/q}_{n/q, (n/q)^2 / (4N/q)} | V_q .
struct VqIdentityReport {
    bool holds = false;
    Rational max_deviation;
    i64 cap4N = 0;
    bool lhs_zero = false;
    bool rhs_zero = false;
};

inline VqIdentityReport vq_poincare_identity_check(i64 N, i64 q, i64 n, i64 cap4N = 240) {
    Level lv(N);
    if (q <= 0 || N % q != 0)
        throw std::invalid_argument("vq_poincare_identity_check: q must divide N");
    if (n <= 0) throw std::invalid_argument("vq_poincare_identity_check: need n > 0");
    if (std::gcd(n, N) != q)
        throw std::invalid_argument("vq_poincare_identity_check: need gcd(n, N) = q");
    const i64 Nq = N / q, nq = n / q;
    const PoincareSpecialValue lhs_sv =
        poincare_special_value(N, {mod_reduce(n, 2 * N), Rational(n * n, 4 * N)});
    const PoincareSpecialValue rhs_sv =
        poincare_special_value(Nq, {mod_reduce(nq, 2 * Nq), Rational(nq * nq, 4 * Nq)});
    const VVForm lhs = lhs_sv.combo.form(cap4N);
    const VVForm rhs = v_raise(rhs_sv.combo.form(cap4N), N, q, cap4N) * Rational(q, sigma(q, 1));

    const auto max_abs = [](const VVForm& f) {
        Rational mx(0);
        for (const auto& [k, v] : f.entries()) {
            const Rational a = v < 0 ? Rational(-v) : v;
            if (a > mx) mx = a;
        }
        return mx;
    };
    VqIdentityReport rep;
    rep.cap4N = cap4N;
    rep.max_deviation = max_abs(lhs - rhs);
    rep.holds = rep.max_deviation == 0;
    rep.lhs_zero = max_abs(lhs) == 0;
    rep.rhs_zero = max_abs(rhs) == 0;
    return rep;
}

}  // namespace eisenkron
