#pragma once

// Gamma_0(N) bookkeeping for squarefree N:
//  * SL2 integer matrices and Moebius action
//  * the discriminant module Z/2N with its Q-value beta^2/4N mod 1
//  * Atkin-Lehner involutions w_c on Z/2N and the divisor group (D(N), star)
//  * P^1(Z/N) coset classification for Gamma_0(N) \ SL_2(Z)
//  * cusps 1/c for c | N, their widths and scaling matrices
//  * random elements of Gamma_0(N) for invariance tests

#include "numtheory.hpp"

#include <map>
#include <random>

namespace eisenkron {

struct SL2 {
    i64 a = 1, b = 0, c = 0, d = 1;

    SL2() = default;
    SL2(i64 a_, i64 b_, i64 c_, i64 d_) : a(a_), b(b_), c(c_), d(d_) {
        if (i128(a) * d - i128(b) * c != 1)
            throw std::invalid_argument("SL2: determinant must be 1");
    }

    static SL2 identity() { return {}; }
    static SL2 T(i64 n) { return {1, n, 0, 1}; }
    static SL2 S() { return {0, -1, 1, 0}; }

    SL2 operator*(const SL2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    SL2 inverse() const { return {d, -b, -c, a}; }
    bool operator==(const SL2&) const = default;

    template <class T_>
    cplx<T_> moebius(const cplx<T_>& z) const {
        cplx<T_> num = T_(a) * z + T_(b);
        cplx<T_> den = T_(c) * z + T_(d);
        return num / den;
    }

    /// Im(Mz) = Im(z) / |cz+d|^2.
    template <class T_>
    T_ moebius_im(const cplx<T_>& z) const {
        cplx<T_> den = T_(c) * z + T_(d);
        return z.im / norm(den);
    }

    bool in_gamma0(i64 N) const { return mod_reduce(c, N) == 0; }
};

// ---------------------------------------------------------------------------
// Level and the discriminant module Z/2N
// ---------------------------------------------------------------------------

struct Level {
    i64 N;
    std::vector<i64> divs;

    explicit Level(i64 N_) : N(N_) {
        if (N <= 0 || !is_squarefree(N))
            throw std::invalid_argument("Level: N must be positive and squarefree");
        divs = divisors(N);
    }
    i64 sigma0() const { return static_cast<i64>(divs.size()); }
    i64 sigma1() const { return sigma(N, 1); }
};

/// Q(beta) = beta^2 / 4N mod 1, canonical representative in [0,1).
inline Rational q_of(i64 N, i64 beta) {
    return Rational(mod_reduce(beta * beta, 4 * N), 4 * N);
}

/// Order of gamma in Z/2N.
inline i64 ord_of(i64 N, i64 gamma) {
    return 2 * N / std::gcd(mod_reduce(gamma, 2 * N), 2 * N);
}

/// c star d = cd/(c,d)^2 (group law on divisors of squarefree N).
inline i64 star(i64 c, i64 d) {
    i64 g = std::gcd(c, d);
    return c / g * (d / g);
}

/// Atkin-Lehner involution w_c on Z/2N: the unique x with
/// x = -gamma mod 2c and x = gamma mod 2N/c.
inline i64 al_apply(i64 N, i64 c, i64 gamma) {
    if (c <= 0 || N % c != 0) throw std::invalid_argument("al_apply: c must divide N");
    auto r = crt(mod_reduce(-gamma, 2 * c), 2 * c, mod_reduce(gamma, 2 * (N / c)), 2 * (N / c));
    if (!r) throw std::runtime_error("al_apply: CRT failure");
    return r->first;
}

/// mu((c,d)): value at c of the character of the divisor group attached to d.
inline int al_character(i64 c, i64 d) { return moebius(std::gcd(c, d)); }

/// E(N): divisors of N with an even number of prime factors.
inline std::vector<i64> even_divisors(i64 N) {
    std::vector<i64> out;
    for (i64 d : divisors(N))
        if (moebius(d) == 1) out.push_back(d);
    return out;
}

// ---------------------------------------------------------------------------
// P^1(Z/N) and coset representatives of Gamma_0(N) \ SL_2(Z)
// ---------------------------------------------------------------------------

/// Classes (a : c) in P^1(Z/N); M, M' in SL_2(Z) generate the same left coset
/// M Gamma_0(N) iff their first columns agree in P^1(Z/N) -- equivalently
/// Gamma_0(N) M^-1 = Gamma_0(N) M'^-1.  (We use it to decompose the double
/// cosets arising in class enumeration; the canonical form is the
/// lexicographic minimum over unit multiples.)
struct P1 {
    i64 N;
    std::vector<i64> units;
    std::vector<std::pair<i64, i64>> reps;
    std::map<std::pair<i64, i64>, int> index_of;

    explicit P1(i64 N_) : N(N_) {
        for (i64 u = 1; u <= N; ++u)
            if (std::gcd(u, N) == 1) units.push_back(u % N == 0 ? 0 : u % N);
        if (N == 1) units = {0};
        for (i64 a = 0; a < N; ++a)
            for (i64 c = 0; c < N; ++c) {
                if (std::gcd(std::gcd(a, c), N) != 1) continue;
                auto k = canonical(a, c);
                if (!index_of.count(k)) {
                    index_of[k] = static_cast<int>(reps.size());
                    reps.push_back(k);
                }
            }
    }

    std::pair<i64, i64> canonical(i64 a, i64 c) const {
        a = mod_reduce(a, N);
        c = mod_reduce(c, N);
        std::pair<i64, i64> best{N, N};
        for (i64 u : units)
            best = std::min(best, std::make_pair(mod_mul_level(u, a), mod_mul_level(u, c)));
        return best;
    }

    int classify(i64 a, i64 c) const {
        auto it = index_of.find(canonical(a, c));
        if (it == index_of.end()) throw std::invalid_argument("P1::classify: not a P1 class");
        return it->second;
    }

    /// SL_2(Z) lift whose first column reduces to reps[i].
    SL2 lift(int i) const {
        auto [a, c] = reps[static_cast<std::size_t>(i)];
        if (c == 0 && N > 1) return SL2::identity();  // class (1:0)
        i64 aa = a, cc = (N == 1) ? 0 : c;
        if (N == 1) return SL2::identity();
        while (std::gcd(aa, cc) != 1) aa += N;
        i64 x, y;
        ext_gcd(aa, cc, x, y);  // x aa + y cc = 1
        return SL2(aa, -y, cc, x);
    }

  private:
    i64 mod_mul_level(i64 u, i64 x) const { return N == 1 ? 0 : mod_reduce(u * x, N); }
};

// ---------------------------------------------------------------------------
// Cusps
// ---------------------------------------------------------------------------

/// Width of the cusp 1/c of Gamma_0(N), c | N squarefree.
inline i64 cusp_width(i64 N, i64 c) { return N / c; }

/// The scaling matrix of the cusp 1/c is (c/N)^{1/2} A_c with
/// A_c = [[N/c, 1], [N, 1+c]], det A_c = N/c.  Moebius action and the
/// imaginary part only need the rational matrix A_c.
struct CuspScaling {
    i64 N, c;
    i64 a11, a12, a21, a22;  // A_c

    CuspScaling(i64 N_, i64 c_) : N(N_), c(c_) {
        if (c <= 0 || N % c != 0) throw std::invalid_argument("CuspScaling: c must divide N");
        a11 = N / c; a12 = 1; a21 = N; a22 = 1 + c;
    }

    /// sigma_{1/c} z.
    template <class T>
    cplx<T> apply(const cplx<T>& z) const {
        return (T(a11) * z + T(a12)) / (T(a21) * z + T(a22));
    }

    /// sigma_{1/c}^{-1} z (adjugate acts projectively).
    template <class T>
    cplx<T> apply_inv(const cplx<T>& z) const {
        return (T(a22) * z - T(a12)) / (T(-a21) * z + T(a11));
    }

    /// Im(sigma_{1/c}^{-1} z) = (N/c) Im z / |-N z + N/c|^2.
    template <class T>
    T im_inv(const cplx<T>& z) const {
        cplx<T> den = T(-a21) * z + T(a11);
        return T(N / c) * z.im / norm(den);
    }
};

// ---------------------------------------------------------------------------
// Random elements for invariance tests
// ---------------------------------------------------------------------------

inline SL2 random_gamma0(i64 N, std::mt19937_64& rng, i64 range = 8) {
    std::uniform_int_distribution<i64> dk(-range, range), dt(-range, range);
    i64 k = dk(rng);
    i64 cc = k * N;
    if (cc == 0) return SL2::T(dt(rng));
    i64 dd = 0;
    do { dd = dt(rng) * 2 + 1 + 2 * range * dt(rng); } while (std::gcd(std::abs(cc), std::abs(dd)) != 1);
    i64 x, y;
    ext_gcd(dd, cc, x, y);  // x dd + y cc = 1
    SL2 m(x, -y, cc, dd);
    return SL2::T(dt(rng)) * m * SL2::T(dt(rng));
}

} // namespace eisenkron
