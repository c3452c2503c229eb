#pragma once

// Exact q-expansion arithmetic over the rationals:
//  * truncated power series with rational coefficients
//  * eta products q^{m/24} prod_n (1 - q^{mn}) with exact fractional exponents
//  * vector-valued expansions indexed by (beta mod 2N, rational exponent)
//  * unary theta series theta^{w_c}, their even-divisor combinations theta_d,
//    exact Petersson pairings, and holomorphic Poincare series as theta combos
//  * the index-raising operator V_q between levels N/q and N
//  * Borcherds product expansions driven by half-integral weight coefficients

#include "discgroup.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace eisenkron {

// ---------------------------------------------------------------------------
// Scalar power series over Q, truncated after q^order
// ---------------------------------------------------------------------------

class PowerSeries {
  public:
    explicit PowerSeries(int order) : order_(order), c_(static_cast<size_t>(order) + 1) {
        if (order < 0) throw std::invalid_argument("PowerSeries: order must be >= 0");
    }

    static PowerSeries one(int order) {
        PowerSeries s(order);
        s.c_[0] = 1;
        return s;
    }

    int order() const { return order_; }

    const Rational& operator[](int n) const {
        check_range(n);
        return c_[static_cast<size_t>(n)];
    }
    void set(int n, const Rational& v) {
        check_range(n);
        c_[static_cast<size_t>(n)] = v;
    }

    PowerSeries operator+(const PowerSeries& o) const {
        check_match(o);
        PowerSeries r(order_);
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] + o.c_[i];
        return r;
    }
    PowerSeries operator-(const PowerSeries& o) const {
        check_match(o);
        PowerSeries r(order_);
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] - o.c_[i];
        return r;
    }
    PowerSeries operator*(const Rational& s) const {
        PowerSeries r(order_);
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] * s;
        return r;
    }
    PowerSeries operator*(const PowerSeries& o) const {
        check_match(o);
        PowerSeries r(order_);
        for (int i = 0; i <= order_; ++i) {
            if (c_[static_cast<size_t>(i)] == 0) continue;
            for (int j = 0; i + j <= order_; ++j) {
                if (o.c_[static_cast<size_t>(j)] == 0) continue;
                r.c_[static_cast<size_t>(i + j)] +=
                    c_[static_cast<size_t>(i)] * o.c_[static_cast<size_t>(j)];
            }
        }
        return r;
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    PowerSeries inverse() const {
        if (c_[0] == 0) throw std::invalid_argument("PowerSeries: not invertible");
        PowerSeries r(order_);
        Rational inv0 = Rational(1) / c_[0];
        r.c_[0] = inv0;
        for (int n = 1; n <= order_; ++n) {
            Rational acc(0);
            for (int k = 1; k <= n; ++k)
                acc += c_[static_cast<size_t>(k)] * r.c_[static_cast<size_t>(n - k)];
            r.c_[static_cast<size_t>(n)] = -inv0 * acc;
        }
        return r;
    }

    /// Integer power; negative exponents go through the inverse.
    PowerSeries pow(i64 e) const {
        if (e < 0) return inverse().pow(-e);
        PowerSeries acc = one(order_);
        PowerSeries base = *this;
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    bool operator==(const PowerSeries& o) const { return order_ == o.order_ && c_ == o.c_; }

  private:
    void check_range(int n) const {
        if (n < 0 || n > order_) throw std::out_of_range("PowerSeries: index out of range");
    }
    void check_match(const PowerSeries& o) const {
        if (order_ != o.order_)
            throw std::invalid_argument("PowerSeries: truncation orders differ");
    }

    int order_;
    std::vector<Rational> c_;
};

/// q^{rho} * series with a rational leading exponent rho.
struct FracSeries {
    Rational rho;
    PowerSeries ser;

    FracSeries(const Rational& rho_, PowerSeries ser_) : rho(rho_), ser(std::move(ser_)) {}

    FracSeries operator*(const FracSeries& o) const { return {rho + o.rho, ser * o.ser}; }
    bool operator==(const FracSeries& o) const { return rho == o.rho && ser == o.ser; }
};

/// prod_{n >= 1} (1 - q^{mult n}) truncated after q^order.
inline PowerSeries eta_product_part(i64 mult, int order) {
    if (mult <= 0) throw std::invalid_argument("eta_product_part: mult must be positive");
    PowerSeries s = PowerSeries::one(order);
    for (i64 d = mult; d <= order; d += mult) {
        // multiply in place by (1 - q^d)
        for (int n = order; n >= static_cast<int>(d); --n)
            s.set(n, s[n] - s[n - static_cast<int>(d)]);
    }
    return s;
}

/// eta(mult * z) = q^{mult/24} prod (1 - q^{mult n}).
inline FracSeries eta_series(i64 mult, int order) {
    return {Rational(mult, 24), eta_product_part(mult, order)};
}

/// prod_d eta(d z)^{r_d} for integer exponents r_d.
inline FracSeries eta_quotient(const std::map<i64, i64>& exps, int order) {
    Rational rho(0);
    PowerSeries s = PowerSeries::one(order);
    for (const auto& [d, r] : exps) {
        if (r == 0) continue;
        rho += Rational(d * r, 24);
        s = s * eta_product_part(d, order).pow(r);
    }
    return {rho, s};
}

// ---------------------------------------------------------------------------
// Vector-valued expansions: coefficients c(beta, n), beta mod 2N, n rational
// with n - beta^2/4N integral.  Exponents are stored scaled by 4N.
// ---------------------------------------------------------------------------

class VVForm {
  public:
    using Key = std::pair<i64, i64>;  // (beta in [0, 2N), 4N * n)

    explicit VVForm(i64 N, std::string weight_tag = "1/2")
        : N_(N), tag_(std::move(weight_tag)) {
        if (N <= 0) throw std::invalid_argument("VVForm: N must be positive");
    }

    i64 level() const { return N_; }
    const std::string& weight_tag() const { return tag_; }
    const std::map<Key, Rational>& entries() const { return c_; }

    /// 4N * n as an integer; throws if n is not a valid exponent for beta.
    i64 scaled_exponent(i64 beta, const Rational& n) const {
        Rational sc = Rational(4 * N_) * n;
        if (denominator(sc) != 1)
            throw std::invalid_argument("VVForm: exponent denominator must divide 4N");
        i64 num = static_cast<i64>(numerator(sc));
        if (mod_reduce(num - beta * beta, 4 * N_) != 0)
            throw std::invalid_argument("VVForm: exponent must lie in beta^2/4N + Z");
        return num;
    }

    Rational coeff(i64 beta, const Rational& n) const {
        beta = mod_reduce(beta, 2 * N_);
        auto it = c_.find({beta, scaled_exponent(beta, n)});
        return it == c_.end() ? Rational(0) : it->second;
    }

    void add_coeff(i64 beta, const Rational& n, const Rational& v) {
        if (v == 0) return;
        beta = mod_reduce(beta, 2 * N_);
        Key k{beta, scaled_exponent(beta, n)};
        Rational& slot = c_[k];
        slot += v;
        if (slot == 0) c_.erase(k);
    }

    VVForm operator+(const VVForm& o) const {
        check_match(o);
        VVForm r = *this;
        for (const auto& [k, v] : o.c_) {
            Rational& slot = r.c_[k];
            slot += v;
            if (slot == 0) r.c_.erase(k);
        }
        return r;
    }
    VVForm operator-(const VVForm& o) const { return *this + (o * Rational(-1)); }
    VVForm operator*(const Rational& s) const {
        VVForm r(N_, tag_);
        if (s == 0) return r;
        r.c_ = c_;
        for (auto& [k, v] : r.c_) v *= s;
        return r;
    }

    /// Image under the Atkin-Lehner involution w_c: component beta of the
    /// result is component w_c(beta) of the input.
    VVForm atkin_lehner(i64 c) const {
        VVForm r(N_, tag_);
        for (const auto& [k, v] : c_) r.c_[{al_apply(N_, c, k.first), k.second}] = v;
        return r;
    }

    /// Largest stored scaled exponent (0 for the empty form).
    i64 max_scaled_exponent() const {
        i64 m = 0;
        for (const auto& [k, v] : c_) m = std::max(m, k.second);
        return m;
    }

    bool operator==(const VVForm& o) const { return N_ == o.N_ && c_ == o.c_; }

  private:
    void check_match(const VVForm& o) const {
        if (N_ != o.N_) throw std::invalid_argument("VVForm: levels differ");
    }

    i64 N_;
    std::string tag_;
    std::map<Key, Rational> c_;
};

// ---------------------------------------------------------------------------
// Unary theta series and their Atkin-Lehner combinations
// ---------------------------------------------------------------------------

/// theta^{w_c} = sum_{j in Z} q^{j^2/4N} e_{w_c(j)}, keeping scaled exponents
/// j^2 <= cap4N.
inline VVForm theta_unary(i64 N, i64 c, i64 cap4N) {
    if (c <= 0 || N % c != 0) throw std::invalid_argument("theta_unary: c must divide N");
    VVForm f(N);
    for (i64 j = -isqrt(cap4N); j <= isqrt(cap4N); ++j)
        f.add_coeff(al_apply(N, c, j), Rational(j * j, 4 * N), 1);
    return f;
}

/// A rational linear combination sum_c coef[c] * theta^{w_c}.
struct ThetaCombo {
    i64 N = 1;
    std::map<i64, Rational> coef;

    bool zero() const {
        for (const auto& [c, v] : coef)
            if (v != 0) return false;
        return true;
    }

    VVForm form(i64 cap4N) const {
        VVForm f(N);
        for (const auto& [c, v] : coef)
            if (v != 0) f = f + theta_unary(N, c, cap4N) * v;
        return f;
    }

    /// Petersson product with another combination, in units of pi/sqrt(N).
    Rational petersson(const ThetaCombo& o) const {
        if (N != o.N) throw std::invalid_argument("ThetaCombo: levels differ");
        Rational acc(0);
        for (const auto& [a, va] : coef)
            for (const auto& [b, vb] : o.coef) {
                i64 g = star(a, b);
                acc += va * vb * Rational(g + N / g, 3);
            }
        return acc;
    }

    /// Weyl vector at the cusp 1/cusp: sqrt(N)/(8 pi) times the Petersson
    /// product with theta^{w_cusp}.
    Rational weyl(i64 cusp) const {
        Rational acc(0);
        for (const auto& [c, v] : coef) {
            i64 g = star(c, cusp);
            acc += v * Rational(g + N / g, 24);
        }
        return acc;
    }

    /// Exponents r_d of the Borcherds product prod_d eta(d z)^{r_d} attached
    /// to this combination (each theta^{w_c} contributes eta(cz) eta((N/c)z)).
    std::map<i64, Rational> eta_exponents() const {
        std::map<i64, Rational> r;
        for (const auto& [c, v] : coef) {
            if (v == 0) continue;
            r[c] += v;
            r[N / c] += v;
        }
        for (auto it = r.begin(); it != r.end();)
            it = (it->second == 0) ? r.erase(it) : std::next(it);
        return r;
    }

    ThetaCombo operator+(const ThetaCombo& o) const {
        if (N != o.N) throw std::invalid_argument("ThetaCombo: levels differ");
        ThetaCombo r = *this;
        for (const auto& [c, v] : o.coef) r.coef[c] += v;
        return r;
    }
    ThetaCombo operator*(const Rational& s) const {
        ThetaCombo r = *this;
        for (auto& [c, v] : r.coef) v *= s;
        return r;
    }
};

/// (theta^{w_a}, theta^{w_b}) = (pi/(3 sqrt N)) (g + N/g) with g = a star b;
/// returned in units of pi/sqrt(N).
inline Rational theta_pet_pair(i64 N, i64 a, i64 b) {
    i64 g = star(a, b);
    return Rational(g + N / g, 3);
}

/// theta_d = sum_{c | N} mu((c, d)) theta^{w_c} for d in E(N).
inline ThetaCombo theta_d_combo(i64 N, i64 d) {
    Level lv(N);
    if (N % d != 0) throw std::invalid_argument("theta_d_combo: d must divide N");
    ThetaCombo t{N, {}};
    for (i64 c : lv.divs) t.coef[c] = Rational(al_character(c, d));
    return t;
}

/// (theta_d, theta_d) = 2 pi sigma_0(N) sigma_1(N/d) phi(d) / (3 sqrt N),
/// in units of pi/sqrt(N).
inline Rational theta_d_norm(i64 N, i64 d) {
    return Rational(2 * Level(N).sigma0() * sigma(N / d, 1) * euler_phi(d), 3);
}

// ---------------------------------------------------------------------------
// Holomorphic Poincare series (index m >= 0) as theta combinations
// ---------------------------------------------------------------------------

/// The divisor f | N with w_f(n) = beta in Z/2N; exists whenever
/// n^2 = beta^2 mod 4N.
inline i64 al_divisor_for(i64 N, i64 n, i64 beta) {
    beta = mod_reduce(beta, 2 * N);
    for (i64 f : divisors(N))
        if (al_apply(N, f, n) == beta) return f;
    throw std::invalid_argument("al_divisor_for: indices are not related by an involution");
}

/// Expansion coefficient of the index-(n, n^2/4N) cusp form family:
/// lambda_d = -12 n mu((f,d)) sigma_0((n,N)) / (sigma_0(N) sigma_1(N/d) phi(d))
/// when (n, d) = 1, and 0 otherwise.
inline Rational poincare_lambda(i64 N, i64 n, i64 f, i64 d) {
    if (std::gcd(n, d) != 1) return Rational(0);
    i64 den = Level(N).sigma0() * sigma(N / d, 1) * euler_phi(d);
    return Rational(-12 * n * al_character(f, d) * sigma(std::gcd(n, N), 0), den);
}

/// P_{beta,m} for m >= 0 as a theta combination: the full average
/// (2/sigma_0) sum_c theta^{w_c} for m = 0, the cusp form
/// sum_{d in E(N), d != 1} lambda_d theta_d for 4Nm = n^2 > 0 a square, and
/// the zero combination otherwise.
inline ThetaCombo poincare_theta_combo(i64 N, i64 beta, const Rational& m) {
    Level lv(N);
    beta = mod_reduce(beta, 2 * N);
    if (m < 0) throw std::invalid_argument("poincare_theta_combo: index must be >= 0");
    Rational sc = Rational(4 * N) * m;
    if (denominator(sc) != 1 || mod_reduce(i64(numerator(sc)) - beta * beta, 4 * N) != 0)
        throw std::invalid_argument("poincare_theta_combo: m must lie in beta^2/4N + Z");
    if (m == 0) {
        if (beta != 0)
            throw std::invalid_argument("poincare_theta_combo: index 0 requires beta = 0");
        ThetaCombo t{N, {}};
        for (i64 c : lv.divs) t.coef[c] = Rational(2, lv.sigma0());
        return t;
    }
    i64 disc = i64(numerator(sc));
    if (!is_square(disc)) return ThetaCombo{N, {}};
    i64 n = isqrt(disc);
    i64 f = al_divisor_for(N, n, beta);
    ThetaCombo acc{N, {}};
    for (i64 d : even_divisors(N)) {
        if (d == 1) continue;
        acc = acc + theta_d_combo(N, d) * poincare_lambda(N, n, f, d);
    }
    return acc;
}

/// The divisor-indexed constants of the degenerate limit expansion for
/// m > 0: C(d) = 24 n mu((f,d)) / (sigma_0(N/(n,N)) sigma_1(N/d) phi(d)) when
/// (n, d) = 1, else 0; equivalently -2 lambda_d.  Keys run over
/// E(N) \ {1}.  The map is empty when 4Nm is not a square.
inline std::map<i64, Rational> hyperbolic_constants(i64 N, i64 beta, const Rational& m) {
    std::map<i64, Rational> out;
    if (!(m > 0)) throw std::invalid_argument("hyperbolic_constants: need m > 0");
    Rational sc = Rational(4 * N) * m;
    if (denominator(sc) != 1 || !is_square(i64(numerator(sc)))) return out;
    i64 n = isqrt(i64(numerator(sc)));
    i64 f = al_divisor_for(N, n, beta);
    for (i64 d : even_divisors(N)) {
        if (d == 1) continue;
        out[d] = Rational(-2) * poincare_lambda(N, n, f, d);
    }
    return out;
}

// ---------------------------------------------------------------------------
// The index-raising operator V_q
// ---------------------------------------------------------------------------

/// f | V_q for f of level N/q, producing a form of level N (q | N, N
/// squarefree).  The coefficient at (gamma, n) is
///   sum_{a | gcd(n - Q(gamma), gamma, q)} c_f(gamma/a mod 2N/q, n q / a^2),
/// where n - Q(gamma) is the integral part of the exponent.  Target indices
/// with scaled exponent 4Nn <= cap4N are produced.
inline VVForm v_raise(const VVForm& f, i64 N, i64 q, i64 cap4N) {
    if (q <= 0 || N % q != 0 || f.level() != N / q)
        throw std::invalid_argument("v_raise: need q | N and f of level N/q");
    VVForm out(N, f.weight_tag());
    for (i64 gamma = 0; gamma < 2 * N; ++gamma) {
        for (i64 num = mod_reduce(gamma * gamma, 4 * N); num <= cap4N; num += 4 * N) {
            // integral part of the exponent relative to the representative
            i64 k = (num - gamma * gamma) / (4 * N);
            i64 g = std::gcd(std::gcd(std::abs(k), gamma), q);  // gcd(0, 0, q) = q
            Rational acc(0);
            for (i64 a : divisors(g)) {
                // a | gamma and a | k force a^2 | num
                acc += f.coeff(gamma / a, Rational(num / (a * a), 4 * (N / q)));
            }
            if (acc != 0) out.add_coeff(gamma, Rational(num, 4 * N), acc);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Borcherds product expansions
// ---------------------------------------------------------------------------

/// q^{rho} prod_{n >= 1} (1 - q^n)^{c_f(n, n^2/4N)} truncated after q^order.
/// The caller must pass a form carrying all indices with scaled exponent up
/// to order^2; the relevant coefficients must be integers.
inline FracSeries borcherds_series(const VVForm& f, const Rational& rho, int order) {
    i64 N = f.level();
    PowerSeries s = PowerSeries::one(order);
    for (i64 n = 1; n <= order; ++n) {
        Rational e = f.coeff(n, Rational(n * n, 4 * N));
        if (e == 0) continue;
        if (denominator(e) != 1)
            throw std::invalid_argument("borcherds_series: exponents must be integers");
        PowerSeries base = PowerSeries::one(order);
        base.set(static_cast<int>(n), Rational(-1));
        s = s * base.pow(i64(numerator(e)));
    }
    return {rho, s};
}

}  // namespace eisenkron
