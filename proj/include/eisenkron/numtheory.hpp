#pragma once

// Exact elementary number theory on 64-bit integers (with __int128
// intermediates), plus the fundamental automorph of an indefinite binary
// quadratic discriminant (Pell-type equation t^2 - D u^2 = 4) computed through
// the classical reduction cycle.

#include "core.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace eisenkron {

using i128 = __int128;

/// Extended gcd: returns g = gcd(a, b) >= 0 with a*x + b*y = g.
inline i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
    if (b == 0) {
        x = (a < 0) ? -1 : 1;
        y = 0;
        return a < 0 ? -a : a;
    }
    i64 x1, y1;
    i64 g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

inline i64 mod_reduce(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 mod_mul(i64 a, i64 b, i64 m) {
    return static_cast<i64>((i128(mod_reduce(a, m)) * mod_reduce(b, m)) % m);
}

inline i64 mod_pow(i64 a, i64 e, i64 m) {
    if (e < 0) throw std::invalid_argument("mod_pow: negative exponent");
    i64 r = 1 % m;
    a = mod_reduce(a, m);
    while (e) {
        if (e & 1) r = mod_mul(r, a, m);
        a = mod_mul(a, a, m);
        e >>= 1;
    }
    return r;
}

inline i64 mod_inv(i64 a, i64 m) {
    i64 x, y;
    i64 g = ext_gcd(mod_reduce(a, m), m, x, y);
    if (g != 1) throw std::invalid_argument("mod_inv: not invertible");
    return mod_reduce(x, m);
}

/// Jacobi symbol (a/n) for odd n > 0.
inline int jacobi(i64 a, i64 n) {
    if (n <= 0 || n % 2 == 0) throw std::invalid_argument("jacobi: n must be odd positive");
    a = mod_reduce(a, n);
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            i64 r = n % 8;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

/// Kronecker symbol (a/n), defined for all integers n.
inline int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int t = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) t = -t;
    }
    int v = 0;
    while (n % 2 == 0) { n /= 2; ++v; }
    if (v > 0) {
        if (a % 2 == 0) return 0;
        if (v % 2 == 1) {
            i64 r = mod_reduce(a, 8);
            if (r == 3 || r == 5) t = -t;
        }
    }
    return t * jacobi(a, n);
}

/// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    i64 d = n - 1;
    int s = 0;
    while (d % 2 == 0) { d /= 2; ++s; }
    for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        i64 x = mod_pow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mod_mul(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

/// Prime factorization by wheel trial division, sorted by prime.
inline std::vector<std::pair<i64, int>> factor(i64 n) {
    if (n <= 0) throw std::invalid_argument("factor: n must be positive");
    std::vector<std::pair<i64, int>> out;
    for (i64 p : {2, 3, 5}) {
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        if (e) out.emplace_back(p, e);
    }
    static constexpr std::array<int, 8> wheel{4, 2, 4, 2, 4, 6, 2, 6};
    i64 p = 7;
    std::size_t w = 0;
    while (p * p <= n) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            out.emplace_back(p, e);
        }
        p += wheel[w];
        w = (w + 1) % wheel.size();
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline std::vector<i64> divisors(i64 n) {
    std::vector<i64> out{1};
    for (auto [p, e] : factor(n)) {
        const std::size_t sz = out.size();
        i64 pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < sz; ++i) out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline int moebius(i64 n) {
    int m = 1;
    for (auto [p, e] : factor(n)) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

inline bool is_squarefree(i64 n) { return moebius(n) != 0; }

inline i64 euler_phi(i64 n) {
    i64 r = n;
    for (auto [p, e] : factor(n)) r -= r / p;
    return r;
}

/// sigma_k(n) = sum of k-th powers of divisors.
inline i64 sigma(i64 n, int k) {
    i64 s = 1;
    for (auto [p, e] : factor(n)) {
        if (k == 0) { s *= e + 1; continue; }
        i64 pk = 1;
        for (int j = 0; j < k; ++j) pk *= p;
        i64 term = 1;  // Horner on 1 + p^k + ... + p^(e k)
        for (int i = 0; i < e; ++i) term = term * pk + 1;
        s *= term;
    }
    return s;
}

inline int valuation(i64 n, i64 p) {
    if (n == 0) throw std::invalid_argument("valuation: n == 0");
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

inline i64 isqrt(i64 n) {
    if (n < 0) throw std::invalid_argument("isqrt: negative");
    i64 r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool is_square(i64 n, i64* root = nullptr) {
    if (n < 0) return false;
    i64 r = isqrt(n);
    if (root) *root = r;
    return r * r == n;
}

/// Solve x = a1 mod m1, x = a2 mod m2 (moduli need not be coprime).
/// Returns (x, lcm) with 0 <= x < lcm, or nullopt if incompatible.
inline std::optional<std::pair<i64, i64>> crt(i64 a1, i64 m1, i64 a2, i64 m2) {
    if (m1 <= 0 || m2 <= 0) throw std::invalid_argument("crt: moduli must be positive");
    i64 g = std::gcd(m1, m2);
    if (mod_reduce(a2 - a1, g) != 0) return std::nullopt;
    const i64 l = m1 / g * m2;
    const i64 m2g = m2 / g;
    i64 t = mod_mul(mod_reduce((a2 - a1) / g, m2g), mod_inv(m1 / g, m2g), m2g);
    i128 xx = i128(mod_reduce(a1, l)) + i128(m1) * t;
    i64 x = static_cast<i64>(((xx % l) + l) % l);
    return std::make_pair(x, l);
}

/// Split a discriminant D = 0, 1 mod 4 (D != 0) as D = d0 * f^2 with d0 a
/// fundamental discriminant.  Perfect-square D gives d0 = 1.
struct FundamentalSplit {
    i64 d0;
    i64 f;
};

inline FundamentalSplit fundamental_split(i64 D) {
    if (D == 0 || mod_reduce(D, 4) > 1)
        throw std::invalid_argument("fundamental_split: not a discriminant");
    i64 kernel = (D < 0) ? -1 : 1;  // squarefree kernel, with sign
    i64 k = 1;                      // |D| = |kernel| * k^2
    for (auto [p, e] : factor(D < 0 ? -D : D)) {
        if (e % 2 == 1) kernel *= p;
        for (int i = 0; i < e / 2; ++i) k *= p;
    }
    if (mod_reduce(kernel, 4) == 1) return {kernel, k};
    return {4 * kernel, k / 2};
}

/// Fundamental solution (t, u), t, u > 0 minimal, of t^2 - D u^2 = 4 for a
/// positive non-square discriminant D.  Obtained from one period of the
/// reduction cycle of the principal form of discriminant D; entries can be
/// huge, hence the exact Integer return type.
inline std::pair<Integer, Integer> pell_fundamental(i64 D) {
    if (D <= 0 || mod_reduce(D, 4) > 1 || is_square(D))
        throw std::invalid_argument("pell_fundamental: need positive non-square discriminant");
    const i64 s = isqrt(D);
    auto reduced = [&](i64 a, i64 b) {
        i64 aa = a < 0 ? -a : a;
        return b >= 1 && b <= s && b >= s + 1 - 2 * aa && b >= 2 * aa - s;
    };
    // rho step: (a,b,c) -> (c, r, (r^2-D)/4c), r = -b mod 2|c| in the
    // standard window; returns delta with r = -b + 2*c*delta.
    auto rho = [&](i64& a, i64& b, i64& c) -> i64 {
        const i64 ac = c < 0 ? -c : c;
        i64 lo = (ac * ac >= D) ? (1 - ac) : (s + 1 - 2 * ac);
        i64 r = lo + mod_reduce(-b - lo, 2 * ac);
        i64 delta = (r + b) / (2 * c);
        i64 na = c, nb = r, nc = static_cast<i64>((i128(r) * r - D) / (4 * c));
        a = na; b = nb; c = nc;
        return delta;
    };

    i64 b0 = mod_reduce(D, 2);
    i64 a = 1, b = b0, c = static_cast<i64>((i128(b0) * b0 - D) / 4);
    int guard = 0;
    while (!reduced(a, b)) {
        rho(a, b, c);
        if (++guard > 64) throw std::runtime_error("pell_fundamental: reduction failed");
    }
    const i64 ra = a, rb = b, rc = c;
    // Walk the cycle, accumulating the transformation.
    Integer m11 = 1, m12 = 0, m21 = 0, m22 = 1;
    do {
        i64 delta = rho(a, b, c);
        // Right-multiply by [[0,-1],[1,delta]].
        Integer n11 = m12, n12 = -m11 + m12 * delta;
        Integer n21 = m22, n22 = -m21 + m22 * delta;
        m11 = n11; m12 = n12; m21 = n21; m22 = n22;
    } while (!(a == ra && b == rb && c == rc));

    Integer t = m11 + m22;
    if (t < 0) t = -t;
    Integer u = m21 / ra;
    if (u < 0) u = -u;
    if (t * t - D * u * u != 4)
        throw std::runtime_error("pell_fundamental: internal check failed");
    return {t, u};
}

/// Primes up to n inclusive (simple sieve).
inline std::vector<i64> primes_up_to(i64 n) {
    std::vector<bool> comp(static_cast<std::size_t>(std::max<i64>(n + 1, 2)), false);
    std::vector<i64> out;
    for (i64 p = 2; p <= n; ++p) {
        if (comp[static_cast<std::size_t>(p)]) continue;
        out.push_back(p);
        for (i64 q = p * p; q <= n; q += p) comp[static_cast<std::size_t>(q)] = true;
    }
    return out;
}

} // namespace eisenkron
