#pragma once

// The Weil representation attached to the discriminant module Z/2N with
// Q(beta) = beta^2/4N, and the generalized Kloosterman sums built from it:
//  * Mp2: the metaplectic double cover of SL_2(Z), elements (M, eps) standing
//    for the pair (M, eps * principal sqrt(c tau + d))
//  * exact quadratic Gauss sums  sum_{t mod c} e((alpha t^2 + h t)/c)
//  * rho(M~) entries in closed form (one Gauss sum per entry), with a
//    generator-word slow path for cross-validation
//  * Kloosterman sums H_c of weight 1/2 and the dual weight 3/2, and the
//    zeta functions Z(s) = sum_{c != 0} |c|^{1-2s} H_c with tail bounds
//  * a fast multiplicative evaluation of the Eisenstein case H_c(0,0,gamma,n)
//    and its closed form as a quotient of Dirichlet L-functions

#include "discgroup.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <complex>

namespace eisenkron {

namespace detail {

/// Fractional part of an exact rational, in [0,1).
inline Rational frac1(const Rational& r) {
    Integer fl = numerator(r) / denominator(r);
    if (r < 0 && fl * denominator(r) != numerator(r)) fl -= 1;
    return r - Rational(fl);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Metaplectic group
// ---------------------------------------------------------------------------

/// Element (M, eps) of the metaplectic double cover, meaning the pair
/// (M, phi) with phi(tau) = eps * sqrt(c tau + d) (principal branch).
struct Mp2 {
    SL2 m;
    int eps = 1;

    Mp2() = default;
    Mp2(const SL2& m_, int eps_) : m(m_), eps(eps_) {
        if (eps != 1 && eps != -1) throw std::invalid_argument("Mp2: eps must be +-1");
    }
    static Mp2 identity() { return {}; }
    static Mp2 T(i64 n) { return {SL2::T(n), 1}; }
    static Mp2 S() { return {SL2::S(), 1}; }
    bool operator==(const Mp2&) const = default;
};

/// Sign sigma = +-1 with sqrt(c1 (M2 tau) + d1) * sqrt(c2 tau + d2)
///  = sigma * sqrt(c3 tau + d3) for M3 = M1 M2 (principal branches).
/// The quotient of the three square roots is exactly +-1; we evaluate it in
/// floating point at tau = i, where it is far from the decision boundary.
inline int metaplectic_sign(const SL2& m1, const SL2& m2) {
    const std::complex<double> tau(0.0, 1.0);
    std::complex<double> m2tau =
        (double(m2.a) * tau + double(m2.b)) / (double(m2.c) * tau + double(m2.d));
    SL2 m3 = m1 * m2;
    std::complex<double> w1 = std::sqrt(double(m1.c) * m2tau + double(m1.d));
    std::complex<double> w2 = std::sqrt(double(m2.c) * tau + double(m2.d));
    std::complex<double> w3 = std::sqrt(double(m3.c) * tau + double(m3.d));
    double sgn = ((w1 * w2) / w3).real();
    if (std::abs(std::abs(sgn) - 1.0) > 0.25)
        throw std::runtime_error("metaplectic_sign: numerically ambiguous");
    return sgn > 0 ? 1 : -1;
}

inline Mp2 mp2_mul(const Mp2& x, const Mp2& y) {
    return {x.m * y.m, x.eps * y.eps * metaplectic_sign(x.m, y.m)};
}

inline Mp2 mp2_inv(const Mp2& x) {
    SL2 mi = x.m.inverse();
    return {mi, x.eps * metaplectic_sign(x.m, mi)};
}

// ---------------------------------------------------------------------------
// Exact quadratic Gauss sums
// ---------------------------------------------------------------------------

/// Exact value of a quadratic Gauss sum, encoded as
///   zero,  or  mag * sqrt(root) * e(phase)
/// with mag, root positive integers and phase an exact rational mod 1.
struct QuadGaussSum {
    bool zero = true;
    i64 mag = 0;
    i64 root = 1;
    Rational phase = 0;

    template <class T>
    cplx<T> value() const {
        using std::sqrt;
        if (zero) return cplx<T>{};
        T r = sqrt(T(root)) * T(mag);
        return r * unit_exp(from_rational<T>(detail::frac1(phase)));
    }
    QuadGaussSum conjugated() const {
        QuadGaussSum g = *this;
        if (!g.zero) g.phase = detail::frac1(-g.phase);
        return g;
    }
};

inline QuadGaussSum gs_mul(const QuadGaussSum& x, const QuadGaussSum& y) {
    if (x.zero || y.zero) return {};
    return {false, x.mag * y.mag, x.root * y.root, detail::frac1(x.phase + y.phase)};
}

/// sum_{t mod c} e((alpha t^2 + h t)/c) for c >= 1, evaluated exactly.
inline QuadGaussSum quad_gauss_sum(i64 alpha, i64 h, i64 c) {
    if (c < 1) throw std::invalid_argument("quad_gauss_sum: c must be >= 1");
    alpha = mod_reduce(alpha, c);
    h = mod_reduce(h, c);
    i64 g = std::gcd(std::gcd(alpha, h), c);
    if (g == 0) g = c;  // alpha = h = 0: the sum is plainly c
    alpha /= g;
    h /= g;
    c /= g;
    QuadGaussSum out{false, g, 1, Rational(0)};
    if (c == 1) return out;
    if (std::gcd(alpha, c) > 1) return {};  // gcd(alpha,h,c)=1, so gcd(alpha,c) never divides h

    int lam = 0;
    i64 c1 = c;
    while (c1 % 2 == 0) { c1 /= 2; ++lam; }

    if (c1 > 1) {
        // odd modulus: G_{c1}(a1, h) = (a1|c1) eps_{c1} sqrt(c1) e(-h^2 (4 a1)^-1 / c1)
        i64 a1 = mod_reduce(i64((i128(alpha) << lam) % c1), c1);
        i64 inv4a = mod_inv(mod_reduce(4 * a1, c1), c1);
        i64 ph = mod_reduce(i64((-i128(inv4a) * h % c1) * h % c1), c1);
        out.phase += Rational(ph, c1);
        if (jacobi(a1, c1) == -1) out.phase += Rational(1, 2);
        if (c1 % 4 == 3) out.phase += Rational(1, 4);
        out.root *= c1;
    }
    if (lam >= 1) {
        i64 q = i64(1) << lam;
        i64 a2 = mod_reduce(i64((i128(alpha) * c1) % q), q);
        if (lam == 1) {
            // G(a2, h, 2) = 1 + (-1)^(a2 + h), a2 odd
            if (h % 2 == 0) return {};
            out.mag *= 2;
        } else {
            if (mod_reduce(h, 2) == 1) return {};
            i64 h2 = h / 2;
            i64 ph = mod_reduce(i64((-i128(mod_inv(mod_reduce(a2, q), q)) * h2 % q) * h2 % q), q);
            out.phase += Rational(ph, q);
            while (lam > 3) {
                out.mag *= 2;
                lam -= 2;
            }
            if (lam == 2) {
                out.mag *= 2;
                out.root *= 2;
                out.phase += Rational(a2 % 4 == 1 ? 1 : -1, 8);
            } else {  // lam == 3
                out.mag *= 4;
                out.phase += Rational(mod_reduce(a2, 8), 8);
            }
        }
    }
    out.phase = detail::frac1(out.phase);
    return out;
}

// ---------------------------------------------------------------------------
// The Weil representation on C[Z/2N]
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
using CMat = std::vector<cplx<T>>;  // row-major n x n

template <class T>
CMat<T> mat_mul(int n, const CMat<T>& A, const CMat<T>& B) {
    CMat<T> C(size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            cplx<T> a = A[size_t(i) * n + k];
            if (a.re == 0 && a.im == 0) continue;
            for (int j = 0; j < n; ++j) C[size_t(i) * n + j] += a * B[size_t(k) * n + j];
        }
    return C;
}

template <class T>
CMat<T> mat_id(int n) {
    CMat<T> I(size_t(n) * n);
    for (int i = 0; i < n; ++i) I[size_t(i) * n + i] = cplx<T>{T(1), T(0)};
    return I;
}

/// Nearest-integer division (ties away from zero), |a - q c| <= |c|/2.
inline i64 nearest_div(i64 a, i64 c) {
    i64 q = a / c, r = a % c;
    if (r != 0 && 2 * std::llabs(r) >= std::llabs(c)) q += ((r > 0) == (c > 0)) ? 1 : -1;
    return q;
}

}  // namespace detail

class WeilRep {
public:
    explicit WeilRep(i64 N) : N_(N) {
        if (N <= 0) throw std::invalid_argument("WeilRep: N must be positive");
    }

    i64 level() const { return N_; }
    int dim() const { return int(2 * N_); }
    i64 norm_index(i64 b) const { return mod_reduce(b, 2 * N_); }

    /// Q(b) = b^2/4N as an exact rational (not reduced mod 1).
    Rational qvalue(i64 b) const { return Rational(b * b, 4 * N_); }

    /// Throws unless r - Q(b) is an integer (or r + Q(b) for the dual side).
    void check_index(i64 b, const Rational& r, bool dual = false) const {
        Rational d = dual ? r + qvalue(b) : r - qvalue(b);
        if (denominator(detail::frac1(d)) != 1)
            throw std::invalid_argument("WeilRep: index r must lie in +-Q(b) + Z");
    }

    /// Matrix entry rho(M~)_{beta,gamma} of the Weil representation.
    template <class T>
    cplx<T> entry(const Mp2& mt, i64 beta, i64 gamma) const {
        const SL2& M = mt.m;
        T sign = T(mt.eps);
        if (M.c > 0) return sign * entry_pos<T>(M, beta, gamma);
        if (M.c == 0) {
            if (M.a == 1) {  // T^b
                if (norm_index(beta - gamma) != 0) return cplx<T>{};
                Rational ph = detail::frac1(Rational(M.b) * qvalue(beta));
                return sign * unit_exp(from_rational<T>(ph));
            }
            // M = (-I) T^x: rho(Z~ T~^x) = e(-1/4) P rho(T~)^x with P: beta -> -beta
            i64 x = -M.b;
            if (norm_index(beta + gamma) != 0) return cplx<T>{};
            Rational ph = detail::frac1(Rational(x) * qvalue(gamma) - Rational(1, 4));
            return sign * unit_exp(from_rational<T>(ph));
        }
        // c < 0: rho((M,+1)) = -rho(Z~) rho((-M)~), so the entry is
        // e(1/4) * rho((-M)~)_{-beta,gamma}
        SL2 mn(-M.a, -M.b, -M.c, -M.d);
        cplx<T> e4{T(0), T(1)};  // e(1/4)
        return sign * e4 * entry_pos<T>(mn, -beta, gamma);
    }

    /// Full 2N x 2N matrix of rho(M~), row index beta, column index gamma.
    template <class T>
    detail::CMat<T> matrix(const Mp2& mt) const {
        int n = dim();
        detail::CMat<T> R(size_t(n) * n);
        for (int b = 0; b < n; ++b)
            for (int g = 0; g < n; ++g) R[size_t(b) * n + g] = entry<T>(mt, b, g);
        return R;
    }

    /// rho(M~) as the product of generator matrices along an S,T word.
    /// Ground truth for validating the closed-form entries.
    template <class T>
    detail::CMat<T> matrix_slow(const Mp2& mt) const {
        int n = dim();
        // Decompose: M = (T^{q_1} S)(T^{q_2} S)...(T^{q_k} S) * (+-T^x)
        std::vector<i64> qs;
        SL2 w = mt.m;
        while (w.c != 0) {
            i64 q = detail::nearest_div(w.a, w.c);
            w = SL2(w.c, w.d, -(w.a - q * w.c), -(w.b - q * w.d));  // S^-1 T^-q w
            qs.push_back(q);
        }
        detail::CMat<T> acc = detail::mat_id<T>(n);
        Mp2 word = Mp2::identity();
        detail::CMat<T> rS = rho_s<T>();
        for (i64 q : qs) {
            if (q != 0) acc = detail::mat_mul(n, acc, rho_t_pow<T>(q));
            acc = detail::mat_mul(n, acc, rS);
            word = mp2_mul(word, mp2_mul(Mp2::T(q), Mp2::S()));
        }
        if (w.a == 1) {
            if (w.b != 0) acc = detail::mat_mul(n, acc, rho_t_pow<T>(w.b));
            word = mp2_mul(word, Mp2::T(w.b));
        } else {
            i64 x = -w.b;  // w = (-I) T^x
            acc = detail::mat_mul(n, detail::mat_mul(n, acc, detail::mat_mul(n, rS, rS)),
                                  rho_t_pow<T>(x));
            word = mp2_mul(word, mp2_mul(mp2_mul(Mp2::S(), Mp2::S()), Mp2::T(x)));
        }
        if (word.m != mt.m) throw std::logic_error("matrix_slow: word reconstruction failed");
        if (word.eps != mt.eps)
            for (auto& z : acc) z = -z;
        return acc;
    }

    template <class T>
    detail::CMat<T> rho_t_pow(i64 q) const {
        int n = dim();
        detail::CMat<T> R(size_t(n) * n);
        for (int b = 0; b < n; ++b) {
            Rational ph = detail::frac1(Rational(q) * qvalue(b));
            R[size_t(b) * n + b] = unit_exp(from_rational<T>(ph));
        }
        return R;
    }

    template <class T>
    detail::CMat<T> rho_s() const {
        using std::sqrt;
        int n = dim();
        detail::CMat<T> R(size_t(n) * n);
        T scale = T(1) / sqrt(T(2 * N_));
        for (int b = 0; b < n; ++b)
            for (int g = 0; g < n; ++g) {
                Rational ph = detail::frac1(Rational(-mod_reduce(i64(b) * g, 2 * N_), 2 * N_)
                                            - Rational(1, 8));
                R[size_t(b) * n + g] = scale * unit_exp(from_rational<T>(ph));
            }
        return R;
    }

private:
    i64 N_;

    // rho(M~)_{beta,gamma} for c > 0 and the principal lift:
    //   e(-1/8)/sqrt(2Nc) * e((a beta^2 - 2 beta gamma + d gamma^2)/(4Nc))
    //                     * G_c(N a, a beta - gamma)
    template <class T>
    cplx<T> entry_pos(const SL2& M, i64 beta, i64 gamma) const {
        using std::sqrt;
        i64 c = M.c;
        QuadGaussSum G = quad_gauss_sum(mod_reduce_i128(i128(N_) * M.a, c),
                                        mod_reduce_i128(i128(M.a) * beta - gamma, c), c);
        if (G.zero) return cplx<T>{};
        i64 L = 4 * N_ * c;
        i128 num = i128(M.a) * beta * beta - i128(2) * beta * gamma + i128(M.d) * gamma * gamma;
        Rational phase = Rational(mod_reduce_i128(num, L), L) + G.phase - Rational(1, 8);
        T mag = sqrt(T(G.root) / T(2 * N_ * c)) * T(G.mag);
        return mag * unit_exp(from_rational<T>(detail::frac1(phase)));
    }

    static i64 mod_reduce_i128(i128 v, i64 m) {
        i64 r = i64(v % m);
        return r < 0 ? r + m : r;
    }
};

// ---------------------------------------------------------------------------
// Kloosterman sums and zeta functions
// ---------------------------------------------------------------------------

/// A component (gamma, n) of a vector-valued Fourier expansion; n must lie
/// in Q(gamma) + Z.
struct FourierIndex {
    i64 gamma;
    Rational n;
};

namespace detail {

template <class T>
cplx<T> phase_unit(i64 num, i64 den) {
    if constexpr (std::is_same_v<T, double>) {
        double th = two_pi<double>() * double(num) / double(den);
        return {std::cos(th), std::sin(th)};
    } else {
        return unit_exp(from_rational<T>(Rational(num, den)));
    }
}

}  // namespace detail

/// Generalized Kloosterman sum of weight 1/2 (or the dual weight 3/2):
///   H_c = e(-sign(c) k/4)/|c| * sum_{d in (Z/c)^*} <e_beta, rho(M~) e_gamma>
///         * e((m a + n d)/c),   M = [[a,b],[c,d]],
/// with the inner product antilinear in its second slot (so the weight-1/2
/// sum carries the conjugated entry, the dual sum the plain entry).
/// Batched over several (gamma, n): the entry per (d, gamma) is shared.
template <class T>
std::vector<cplx<T>> kloosterman_h_batch(const WeilRep& rep, i64 c, i64 beta, const Rational& m,
                                         const std::vector<FourierIndex>& idx, bool dual = false) {
    if (c == 0) throw std::invalid_argument("kloosterman_h_batch: c must be nonzero");
    rep.check_index(beta, m, dual);
    i64 N = rep.level();
    i64 C = std::llabs(c);
    int sgn = c > 0 ? 1 : -1;
    i64 L = 4 * N * C;
    i64 Mnum = i64(numerator(Rational(4 * N) * m));

    // distinct gamma values and per-index numerators 4N n
    std::vector<i64> gammas;
    std::vector<int> slot(idx.size());
    std::vector<i64> Nnum(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
        rep.check_index(idx[i].gamma, idx[i].n, dual);
        Nnum[i] = i64(numerator(Rational(4 * N) * idx[i].n));
        i64 g = rep.norm_index(idx[i].gamma);
        auto it = std::find(gammas.begin(), gammas.end(), g);
        slot[i] = int(it - gammas.begin());
        if (it == gammas.end()) gammas.push_back(g);
    }

    std::vector<cplx<T>> out(idx.size());
    std::vector<cplx<T>> E(gammas.size());
    for (i64 d = 0; d < C; ++d) {
        if (std::gcd(d, C) != 1) continue;
        i64 a = C == 1 ? 0 : mod_inv(d, C);
        i64 b = i64((i128(a) * d - 1) / c);
        Mp2 mt{SL2(a, b, c, d), 1};
        for (size_t j = 0; j < gammas.size(); ++j) {
            E[j] = rep.entry<T>(mt, beta, gammas[j]);
            if (!dual) E[j] = conj(E[j]);
        }
        for (size_t i = 0; i < idx.size(); ++i) {
            i64 ph = mod_reduce(sgn * mod_reduce(i64((i128(Mnum) * a + i128(Nnum[i]) * d) % L), L), L);
            out[i] += E[slot[i]] * detail::phase_unit<T>(ph, L);
        }
    }
    Rational kph = detail::frac1(Rational(-sgn * (dual ? 3 : 1), 8));
    cplx<T> pref = unit_exp(from_rational<T>(kph)) / T(C);
    for (auto& z : out) z *= pref;
    return out;
}

template <class T>
cplx<T> kloosterman_h(const WeilRep& rep, i64 c, i64 beta, const Rational& m, i64 gamma,
                      const Rational& n, bool dual = false) {
    return kloosterman_h_batch<T>(rep, c, beta, m, {{gamma, n}}, dual)[0];
}

/// Value of a truncation of sum_{c != 0} |c|^{1-2s} H_c together with a bound
/// on the discarded tail (requires Re(s) > 1).
template <class T>
struct TailBounded {
    cplx<T> value;
    T tail;
};

template <class T>
TailBounded<T> kloosterman_zeta(const WeilRep& rep, i64 beta, const Rational& m, i64 gamma,
                                const Rational& n, const cplx<T>& s, i64 cutoff,
                                bool dual = false) {
    using std::pow;
    if (!(s.re > 1)) throw std::invalid_argument("kloosterman_zeta: need Re(s) > 1");
    cplx<T> acc{};
    cplx<T> expo = cplx<T>{T(1), T(0)} - T(2) * s;
    for (i64 C = 1; C <= cutoff; ++C) {
        cplx<T> h = kloosterman_h<T>(rep, C, beta, m, gamma, n, dual) +
                    kloosterman_h<T>(rep, -C, beta, m, gamma, n, dual);
        acc += pow(cplx<T>{T(C), T(0)}, expo) * h;
    }
    // |H_c| <= 1 empirically; integral comparison for the tail
    T re2 = T(2) * s.re - T(2);
    T tail = T(2) * pow(T(cutoff), -re2) / re2;
    return {acc, tail};
}

// ---------------------------------------------------------------------------
// Eisenstein case: fast multiplicative H_c and the L-function closed form
// ---------------------------------------------------------------------------

namespace detail {

/// Ramanujan sum c_{p^e}(K) = sum over units w mod p^e of e(wK/p^e).
inline i64 ramanujan_pp(i64 p, int e, i64 K) {
    i64 q = 1;
    for (int i = 0; i < e; ++i) q *= p;
    i64 Kr = mod_reduce(K, q);
    int v = 0;
    if (Kr == 0)
        v = e;
    else
        while (Kr % p == 0) { Kr /= p; ++v; }
    if (v >= e) return q - q / p;   // phi(p^e)
    if (v == e - 1) return -(q / p);
    return 0;
}

/// sum_{w in (Z/p^e)^*} (w|p) e(wK/p^e) for odd p, as an exact value.
inline QuadGaussSum twisted_unit_sum_odd(i64 p, int e, i64 K) {
    i64 q = 1;
    for (int i = 0; i < e; ++i) q *= p;
    i64 Kr = mod_reduce(K, q);
    int v = 0;
    i64 Kc = Kr;
    while (Kc != 0 && Kc % p == 0) { Kc /= p; ++v; }
    if (Kr == 0) v = e;
    if (v != e - 1) return {};
    QuadGaussSum out{false, 1, p, Rational(0)};
    for (int i = 0; i < e - 1; ++i) out.mag *= p;
    if (jacobi(Kc, p) == -1) out.phase += Rational(1, 2);
    if (p % 4 == 3) out.phase += Rational(1, 4);
    out.phase = frac1(out.phase);
    return out;
}

}  // namespace detail

/// H_c(0, 0, gamma, n) evaluated through per-prime closed forms; equals the
/// literal kloosterman_h but costs O(sum of prime powers) instead of phi(|c|).
/// For c < 0 uses H_{-C}(gamma) = conj(H_C(-gamma)).
template <class T>
cplx<T> eisenstein_h(const WeilRep& rep, i64 c, i64 gamma, const Rational& n) {
    using std::sqrt;
    if (c == 0) throw std::invalid_argument("eisenstein_h: c must be nonzero");
    if (c < 0) return conj(eisenstein_h<T>(rep, -c, -gamma, n));
    rep.check_index(gamma, n);
    i64 N = rep.level();
    i64 C = c;
    Rational ntil_r = n - rep.qvalue(gamma);
    i64 ntil = i64(numerator(ntil_r));  // integer by check_index

    // H_C = (1/(C sqrt(2NC))) * prod_{q = p^e || C} F_q with
    // F_q = sum_{u unit mod q} conj(G_q(N u^-1 (C/q), -gamma)) e(ntil u (C/q)^-1 / q)
    QuadGaussSum acc{false, 1, 1, Rational(0)};
    cplx<T> acc2{T(1), T(0)};  // brute 2-part (complex, not exact)
    bool have2 = false;

    for (auto [p, e] : factor(C)) {
        i64 q = 1;
        for (int i = 0; i < e; ++i) q *= p;
        i64 Mq = C / q;
        i64 Mqbar = mod_inv(mod_reduce(Mq, q), q);
        if (p == 2) {
            // brute force over the units of the 2-part
            cplx<T> f{};
            for (i64 u = 1; u < q; u += 2) {
                i64 ubar = mod_inv(u, q);
                QuadGaussSum G = quad_gauss_sum(mod_reduce(i64((i128(N) * ubar % q) * Mq % q), q),
                                                -gamma, q);
                if (G.zero) continue;
                i64 ph = mod_reduce(i64(i128(ntil) * u % q) * Mqbar % q, q);
                f += G.conjugated().value<T>() * detail::phase_unit<T>(ph, q);
            }
            acc2 = f;
            have2 = true;
            if (f.re == 0 && f.im == 0) return cplx<T>{};
            continue;
        }
        // odd prime power: pull the unit-independent gcd out of the Gauss sum
        i64 A = mod_reduce(i64(i128(N) * Mq % q), q);
        i64 gam_q = mod_reduce(gamma, q);
        i64 g = std::gcd(std::gcd(A, gam_q), q);
        i64 qp = q / g;
        QuadGaussSum Fq;
        if (qp == 1) {
            // G is the constant g; a plain Ramanujan sum remains
            i64 ram = detail::ramanujan_pp(p, e, i64(i128(ntil) * Mqbar % q));
            if (ram == 0) return cplx<T>{};
            Fq = {false, g * std::llabs(ram), 1, Rational(ram < 0 ? 1 : 0, ram < 0 ? 2 : 1)};
        } else {
            i64 A0 = mod_reduce(A / g, qp);
            if (std::gcd(A0, qp) > 1) return cplx<T>{};  // every G vanishes
            i64 hp = mod_reduce(-(gam_q / g), qp);
            // conj(G_{qp}(A0 v, hp)) = (A0 v|qp) conj(eps_qp) sqrt(qp)
            //                          * e(+hp^2 (4 A0 v)^-1 / qp)
            // combined exponent in w = v^-1:  K = g * hp^2 (4A0)^-1 + ntil Mqbar  (mod q)
            i64 inv4A0 = mod_inv(mod_reduce(4 * A0, qp), qp);
            i64 Kp = mod_reduce(i64((i128(hp) * hp % qp) * inv4A0 % qp), qp);
            i64 K = mod_reduce(i64((i128(g) * Kp + i128(ntil) * Mqbar) % q), q);
            int tpar = 0;  // (v|qp) = (v|p)^{e'} with qp = p^{e'}
            for (i64 t = qp; t > 1; t /= p) tpar ^= 1;
            QuadGaussSum TS;
            if (tpar == 0) {
                i64 ram = detail::ramanujan_pp(p, e, K);
                if (ram == 0) return cplx<T>{};
                TS = {false, std::llabs(ram), 1, Rational(ram < 0 ? 1 : 0, ram < 0 ? 2 : 1)};
            } else {
                TS = detail::twisted_unit_sum_odd(p, e, K);
                if (TS.zero) return cplx<T>{};
            }
            Fq = {false, g, qp, Rational(0)};
            if (jacobi(mod_reduce(A0, qp), qp) == -1) Fq.phase += Rational(1, 2);
            if (qp % 4 == 3) Fq.phase -= Rational(1, 4);  // conj(eps_qp)
            Fq = gs_mul(Fq, TS);
        }
        acc = gs_mul(acc, Fq);
    }
    cplx<T> val = acc.value<T>();
    if (have2) val *= acc2;
    return val / (T(C) * sqrt(T(2 * N * C)));
}

/// Direct evaluation of Z(s; 0,0,gamma,n): literal Kloosterman sums for
/// |c| <= literal_cutoff, the fast multiplicative path beyond.
template <class T>
TailBounded<T> eisenstein_zeta_direct(const WeilRep& rep, i64 gamma, const Rational& n,
                                      const cplx<T>& s, i64 cutoff, i64 literal_cutoff = 3000) {
    using std::pow;
    if (!(s.re > 1)) throw std::invalid_argument("eisenstein_zeta_direct: need Re(s) > 1");
    cplx<T> acc{};
    cplx<T> expo = cplx<T>{T(1), T(0)} - T(2) * s;
    for (i64 C = 1; C <= cutoff; ++C) {
        cplx<T> h;
        if (C <= literal_cutoff)
            h = kloosterman_h<T>(rep, C, 0, Rational(0), gamma, n) +
                kloosterman_h<T>(rep, -C, 0, Rational(0), gamma, n);
        else
            h = eisenstein_h<T>(rep, C, gamma, n) + eisenstein_h<T>(rep, -C, gamma, n);
        acc += pow(cplx<T>{T(C), T(0)}, expo) * h;
    }
    T re2 = T(2) * s.re - T(2);
    T tail = T(2) * pow(T(cutoff), -re2) / re2;
    return {acc, tail};
}

// ---------------------------------------------------------------------------
// Representation numbers and the closed form of the Eisenstein zeta
// ---------------------------------------------------------------------------

/// N_{gamma,-n}(a): number of x mod a with N x^2 - gamma x = n - gamma^2/4N
/// (mod a) -- the representation count on the rank-one lattice whose
/// discriminant module is the same Z/2N.  These counts stabilize in prime
/// power towers, which is what the local polynomials below rely on.
inline i64 rep_count(i64 N, i64 gamma, const Rational& n, i64 a) {
    if (a < 1) throw std::invalid_argument("rep_count: a must be >= 1");
    Rational ntil_r = n - Rational(gamma * gamma, 4 * N);
    if (denominator(ntil_r) != 1)
        throw std::invalid_argument("rep_count: n must lie in Q(gamma) + Z");
    i64 ntil = i64(numerator(ntil_r));
    i64 total = 0;
    for (i64 x = 0; x < a; ++x)
        if (mod_reduce(i64((i128(N) * x * x - i128(gamma) * x - ntil) % a), a) == 0) ++total;
    return total;
}

/// Closed form of the Eisenstein Kloosterman zeta:
///   Z(1/4 + s; 0, 0, gamma, n)
/// as a quotient of Dirichlet L-functions times a finite Euler product.
/// The argument s is the shift (the series argument is 1/4 + s).
template <class T>
cplx<T> eisenstein_zeta_closed(const WeilRep& rep, i64 gamma, const Rational& n,
                               const cplx<T>& s) {
    using std::pow;
    using std::sqrt;
    rep.check_index(gamma, n);
    i64 N = rep.level();
    cplx<T> two_s = T(2) * s;
    cplx<T> four_s = T(4) * s;
    T sqrt2N = sqrt(T(2) / T(N));

    if (n == 0) {
        cplx<T> val = sqrt2N * riemann_zeta(four_s - T(1)) / riemann_zeta(four_s);
        for (auto [p, e] : factor(N)) {
            (void)e;
            cplx<T> pm2s = pow(cplx<T>{T(p), T(0)}, -two_s);
            val *= (T(1) + T(p) * pm2s) / (T(1) + pm2s);
        }
        return val;
    }

    i64 g = std::gcd(mod_reduce(gamma, 2 * N) == 0 ? 2 * N : mod_reduce(gamma, 2 * N), 2 * N);
    i64 ord = 2 * N / g;  // order of gamma in Z/2N
    Rational Dq = Rational(4 * N) * Rational(ord) * Rational(ord) * n;
    if (denominator(Dq) != 1) throw std::logic_error("eisenstein_zeta_closed: 4N ord^2 n not integral");
    i64 D = i64(numerator(Dq));
    auto [D0, f] = fundamental_split(D);

    cplx<T> val = sqrt2N * dirichlet_l_kronecker<T>(D0, two_s) / riemann_zeta(four_s);

    // sigma_{gamma,-n}(2s + 1/2) over the primes of f^2 D0
    for (auto [p, e] : factor(std::llabs(D))) {
        (void)e;
        int chi = kronecker(D0, p);
        Rational ton = Rational(4 * N) * n / Rational(g);  // = 2 ord(gamma) n
        if (denominator(ton) != 1)
            throw std::logic_error("eisenstein_zeta_closed: 2 ord(gamma) n not integral");
        i64 two_ord_n = i64(numerator(ton));
        int wp = 1 + 2 * valuation(std::llabs(two_ord_n), p);
        cplx<T> X = pow(cplx<T>{T(p), T(0)}, -two_s);
        // L^{(p)}(X) = N(p^wp) X^wp + (1 - X) sum_{nu < wp} N(p^nu) X^nu
        cplx<T> Xpow{T(1), T(0)};
        cplx<T> tail_sum{};
        i64 a = 1;
        for (int nu = 0; nu < wp; ++nu) {
            tail_sum += T(rep_count(N, gamma, n, a)) * Xpow;
            Xpow *= X;
            a *= p;
        }
        cplx<T> Lp = T(rep_count(N, gamma, n, a)) * Xpow + (cplx<T>{T(1), T(0)} - X) * tail_sum;
        cplx<T> X2 = X * X;
        val *= (cplx<T>{T(1), T(0)} - T(chi) * X) / (cplx<T>{T(1), T(0)} - X2) * Lp;
    }
    return val;
}

}  // namespace eisenkron
