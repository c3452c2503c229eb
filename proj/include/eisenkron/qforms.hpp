#pragma once

// Integral binary quadratic forms [a, b, c] ~ a x^2 + b x y + c y^2 together
// with their Gamma_0(N) class theory.  Forms of discriminant D = b^2 - 4ac
// with N | a and b fixed mod 2N are the coordinate face of the level-N
// lattice vectors used by the Eisenstein/lift machinery; this header keeps
// everything purely arithmetic (exact i64/i128/mpz), while the geometric
// evaluators (CM points, hyperbolic distances, majorants) are templated over
// the real type so both double and multiprecision paths share one code path.

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"
#include "discgroup.hpp"
#include "numtheory.hpp"

namespace eisenkron {

namespace detail {

inline i64 checked_i64(i128 v, const char* msg) {
    if (v > std::numeric_limits<i64>::max() || v < std::numeric_limits<i64>::min())
        throw std::overflow_error(msg);
    return static_cast<i64>(v);
}

}  // namespace detail

struct BinaryQF {
    i64 a = 0, b = 0, c = 0;

    i64 disc() const {
        i128 d = i128(b) * b - i128(4) * a * c;
        return detail::checked_i64(d, "BinaryQF::disc overflow");
    }
    i64 content() const {
        i64 g = std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
        return g == 0 ? 1 : g;
    }
    BinaryQF divided_by(i64 r) const {
        if (r == 0 || a % r || b % r || c % r)
            throw std::invalid_argument("BinaryQF::divided_by: not a divisor");
        return {a / r, b / r, c / r};
    }
    i64 eval(i64 x, i64 y) const {
        i128 v = i128(a) * x * x + i128(b) * x * y + i128(c) * y * y;
        return detail::checked_i64(v, "BinaryQF::eval overflow");
    }
    // Right action (Q.M)(x, y) = Q(M (x, y)^t); compatible with
    // (Q.M1).M2 = Q.(M1 M2).
    BinaryQF act(const SL2& m) const {
        i128 A = i128(a) * m.a * m.a + i128(b) * m.a * m.c + i128(c) * m.c * m.c;
        i128 B = i128(2) * a * m.a * m.b + i128(b) * (i128(m.a) * m.d + i128(m.b) * m.c)
               + i128(2) * c * m.c * m.d;
        i128 C = i128(a) * m.b * m.b + i128(b) * m.b * m.d + i128(c) * m.d * m.d;
        return {detail::checked_i64(A, "BinaryQF::act overflow"),
                detail::checked_i64(B, "BinaryQF::act overflow"),
                detail::checked_i64(C, "BinaryQF::act overflow")};
    }
    friend bool operator==(const BinaryQF&, const BinaryQF&) = default;
    friend bool operator<(const BinaryQF& l, const BinaryQF& r) {
        return std::array<i64, 3>{l.a, l.b, l.c} < std::array<i64, 3>{r.a, r.b, r.c};
    }
};

inline std::ostream& operator<<(std::ostream& os, const BinaryQF& q) {
    return os << '[' << q.a << ',' << q.b << ',' << q.c << ']';
}

// Level-aware action: only Gamma_0(N) preserves the pair (N | a, b mod 2N).
inline BinaryQF gamma0_act(i64 N, const BinaryQF& q, const SL2& m) {
    if (!m.in_gamma0(N))
        throw std::invalid_argument("gamma0_act: matrix not in Gamma_0(N)");
    return q.act(m);
}

// ---------------------------------------------------------------------------
// Reduction theory
// ---------------------------------------------------------------------------

// Positive definite (D < 0, a > 0) Gaussian reduction: returns the reduced
// form R with -a < b <= a <= c (and b >= 0 when a == c) plus M with Q.M = R.
inline std::pair<BinaryQF, SL2> reduce_posdef(BinaryQF q) {
    if (q.disc() >= 0 || q.a <= 0)
        throw std::invalid_argument("reduce_posdef: need a > 0, disc < 0");
    SL2 m = SL2::identity();
    for (int guard = 0; guard < 8000; ++guard) {
        if (q.c < q.a || (q.c == q.a && q.b < 0)) {
            q = q.act(SL2::S());
            m = m * SL2::S();
            continue;
        }
        if (q.b > q.a || q.b <= -q.a) {
            // translate b into (-a, a]
            i64 k = -static_cast<i64>(std::llround(static_cast<double>(q.b) / (2.0 * q.a)));
            // exact fixup for rounding at the boundary
            while (q.b + 2 * q.a * k > q.a) --k;
            while (q.b + 2 * q.a * k <= -q.a) ++k;
            q = q.act(SL2::T(k));
            m = m * SL2::T(k);
            continue;
        }
        return {q, m};
    }
    throw std::runtime_error("reduce_posdef: no convergence");
}

inline bool is_reduced_posdef(const BinaryQF& q) {
    return q.a > 0 && -q.a < q.b && q.b <= q.a && q.a <= q.c && !(q.a == q.c && q.b < 0);
}

// Indefinite (nonsquare D > 0) form reduction a la Gauss/Zagier rho-steps.
// "Reduced" means sqrt(D) - 2|a| < b < sqrt(D) as integers:
//   b <= s  and  b >= s + 1 - 2|a|  and  b >= 2|a| - s,  s = isqrt(D).
inline bool is_reduced_indef(const BinaryQF& q) {
    i64 D = q.disc();
    if (D <= 0) return false;
    i64 s = isqrt(D);
    if (s * s == D) return false;
    i64 t = 2 * std::abs(q.a);
    return q.b <= s && q.b >= s + 1 - t && q.b >= t - s;
}

// One rho-step (a,b,c) -> (c, r, (r^2-D)/(4c)); returns the SL2 applied.
inline SL2 rho_step_indef(BinaryQF& q) {
    i64 D = q.disc();
    i64 s = isqrt(D);
    i64 cc = q.c;
    if (cc == 0) throw std::invalid_argument("rho_step_indef: c == 0 (square disc?)");
    i64 t = 2 * std::abs(cc);
    // r = -b mod 2|c| placed in the window
    i64 r = mod_reduce(-q.b, t);
    if (std::abs(cc) > s) {
        // far from reduced: window (-|c|, |c|]
        if (r > std::abs(cc)) r -= t;
    } else {
        // cycle window [s+1-2|c|, s]
        while (r > s) r -= t;
        while (r < s + 1 - t) r += t;
    }
    i64 delta = (r + q.b) / (2 * cc);
    if ((r + q.b) % (2 * cc) != 0)
        throw std::runtime_error("rho_step_indef: inexact delta");
    SL2 step{0, -1, 1, delta};
    q = q.act(step);
    return step;
}

inline std::pair<BinaryQF, SL2> reduce_indef(BinaryQF q) {
    i64 D = q.disc();
    i64 s = isqrt(D);
    if (D <= 0 || s * s == D)
        throw std::invalid_argument("reduce_indef: need nonsquare D > 0");
    SL2 m = SL2::identity();
    for (int guard = 0; guard < 20000; ++guard) {
        if (is_reduced_indef(q)) return {q, m};
        m = m * rho_step_indef(q);
    }
    throw std::runtime_error("reduce_indef: no convergence");
}

// Full rho-cycle of a reduced indefinite form (each entry reduced).
inline std::vector<BinaryQF> indef_cycle(const BinaryQF& q0) {
    if (!is_reduced_indef(q0))
        throw std::invalid_argument("indef_cycle: form not reduced");
    std::vector<BinaryQF> cyc;
    BinaryQF q = q0;
    for (int guard = 0; guard < 20000; ++guard) {
        cyc.push_back(q);
        rho_step_indef(q);
        if (q == q0) return cyc;
    }
    throw std::runtime_error("indef_cycle: cycle did not close");
}

// Square discriminant D = n^2 > 0: every form is SL2-equivalent to exactly
// one [0, n, j], 0 <= j < n.  Returns ([0,n,j], M) with Q.M = [0,n,j].
inline std::pair<BinaryQF, SL2> square_canonical(BinaryQF q) {
    i64 D = q.disc();
    i64 n = 0;
    if (D <= 0 || !is_square(D, &n))
        throw std::invalid_argument("square_canonical: need square D > 0");
    auto primitive_vec = [](i64 x, i64 y) {
        i64 g = std::gcd(std::abs(x), std::abs(y));
        return std::pair<i64, i64>{x / g, y / g};
    };
    std::vector<std::pair<i64, i64>> zeros;
    if (q.a != 0) {
        zeros.push_back(primitive_vec(-q.b + n, 2 * q.a));
        zeros.push_back(primitive_vec(-q.b - n, 2 * q.a));
    } else {
        zeros.emplace_back(1, 0);
        if (q.b != 0) zeros.push_back(primitive_vec(-q.c, q.b));
        else throw std::invalid_argument("square_canonical: degenerate form");
    }
    for (auto [v1, v2] : zeros) {
        i64 x = 0, y = 0;
        if (ext_gcd(v1, v2, x, y) != 1)
            throw std::runtime_error("square_canonical: zero vector not primitive");
        SL2 m{v1, -y, v2, x};
        BinaryQF r = q.act(m);
        if (r.a != 0) throw std::runtime_error("square_canonical: zero line lost");
        if (r.b != n) continue;  // the other line carries +n
        i64 j = mod_reduce(r.c, n);
        i64 k = (j - r.c) / n;
        m = m * SL2::T(k);
        r = q.act(m);
        if (r.a != 0 || r.b != n || r.c != j)
            throw std::runtime_error("square_canonical: normalization failed");
        return {r, m};
    }
    throw std::runtime_error("square_canonical: no +n orientation found");
}

// ---------------------------------------------------------------------------
// SL2(Z) class representatives of a fixed discriminant (all forms, including
// imprimitive ones; for D < 0 only positive definite forms are considered).
// ---------------------------------------------------------------------------

inline std::vector<BinaryQF> sl2_class_reps(i64 D) {
    if (D == 0 || mod_reduce(D, 4) > 1)
        throw std::invalid_argument("sl2_class_reps: D must be nonzero, 0 or 1 mod 4");
    std::vector<BinaryQF> out;
    if (D < 0) {
        for (i64 a = 1; 3 * a * a <= -D; ++a) {
            for (i64 b = -a + 1; b <= a; ++b) {
                if (mod_reduce(b - D, 2) != 0) continue;
                i64 num = b * b - D;
                if (num % (4 * a) != 0) continue;
                i64 c = num / (4 * a);
                if (c < a) continue;
                if (a == c && b < 0) continue;
                out.push_back({a, b, c});
            }
        }
        return out;
    }
    if (i64 n = 0; is_square(D, &n)) {
        for (i64 j = 0; j < n; ++j) out.push_back({0, n, j});
        return out;
    }
    // nonsquare D > 0: collect reduced forms, group into rho-cycles
    i64 s = isqrt(D);
    std::set<BinaryQF> reduced;
    for (i64 b = 1; b <= s; ++b) {
        if (mod_reduce(b - D, 2) != 0) continue;
        i64 num = (b * b - D) / 4;  // = a*c < 0
        for (i64 a1 = 1; a1 * a1 <= -num; ++a1) {
            if (num % a1 != 0) continue;
            for (i64 a : {a1, num / a1, -a1, -num / a1}) {
                BinaryQF q{a, b, num / a};
                if (is_reduced_indef(q)) reduced.insert(q);
            }
        }
    }
    std::set<BinaryQF> seen;
    for (const auto& q : reduced) {
        if (seen.count(q)) continue;
        auto cyc = indef_cycle(q);
        for (const auto& f : cyc) seen.insert(f);
        out.push_back(*std::min_element(cyc.begin(), cyc.end()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Gamma_0(N) classes with b == beta (mod 2N), N | a
// ---------------------------------------------------------------------------

// Automorph of the form [A,B,C] attached to a solution t^2 - D u^2 = 4:
//   [[(t - B u)/2, -C u], [A u, (t + B u)/2]].
inline std::array<Integer, 4> automorph_matrix(const BinaryQF& q, const Integer& t,
                                               const Integer& u) {
    Integer bu = Integer(q.b) * u;
    if ((t - bu) % 2 != 0)
        throw std::invalid_argument("automorph_matrix: parity violated");
    return {(t - bu) / 2, Integer(-q.c) * u, Integer(q.a) * u, (t + bu) / 2};
}

// ((t1 + u1 sqrt(Dp))/2)^k as a half-integer pair (t_k, u_k).
inline std::pair<Integer, Integer> automorph_power(const Integer& t1, const Integer& u1,
                                                   i64 Dp, i64 k) {
    Integer t = 2, u = 0;
    for (i64 i = 0; i < k; ++i) {
        Integer nt = t * t1 + Integer(Dp) * u * u1;
        Integer nu = t * u1 + u * t1;
        if (nt % 2 != 0 || nu % 2 != 0)
            throw std::runtime_error("automorph_power: parity violated");
        t = nt / 2;
        u = nu / 2;
    }
    return {t, u};
}

struct Gamma0Class {
    BinaryQF form;          // N | form.a, form.b == beta (mod 2N)
    i64 content = 1;        // gcd of coefficients
    bool infinite_stab = false;
    // finite case: order of the stabilizer in Gamma_0(N), including -I
    i64 stab_order = 2;
    // infinite case (nonsquare D > 0): the stabilizer mod +-I is cyclic,
    // generated by automorph_matrix(form / content, t_stab, u_stab) where
    // (t_stab, u_stab) solves t^2 - disc_prim u^2 = 4; stab_exponent is the
    // power of the fundamental solution this corresponds to.
    i64 stab_exponent = 0;
    i64 disc_prim = 0;
    Integer t_stab = 0, u_stab = 0;
};

struct ClassList {
    i64 N = 1;
    i64 beta = 0;  // normalized to [0, 2N)
    i64 D = 0;
    std::vector<Gamma0Class> classes;
};

inline ClassList enumerate_classes(i64 N, i64 beta, i64 D) {
    Level lev(N);  // validates N
    if (D == 0) throw std::invalid_argument("enumerate_classes: D must be nonzero");
    i64 beta_c = mod_reduce(beta, 2 * N);
    if (mod_reduce(D, 4 * N) != mod_reduce(beta_c * beta_c, 4 * N))
        throw std::invalid_argument("enumerate_classes: D != beta^2 mod 4N");
    i64 sq_n = 0;
    bool square = D > 0 && is_square(D, &sq_n);

    P1 p1(N);
    ClassList out{N, beta_c, D, {}};

    for (const BinaryQF& q0 : sl2_class_reps(D)) {
        i64 r = q0.content();
        BinaryQF prim = q0.divided_by(r);
        i64 Dp = D / (r * r);

        // generator of Aut(q0)/{+-I} (trivial for square D and generic D < 0)
        bool has_sigma = false;
        std::array<i64, 4> sig{1, 0, 0, 1};  // mod N is all the orbit needs
        i64 nbar = 1;                        // |Aut/{+-I}| for D < 0
        Integer t1 = 0, u1 = 0;
        if (D < 0) {
            if (prim.a == 1 && prim.b == 0 && prim.c == 1) {
                nbar = 2;
                sig = {0, -1, 1, 0};
                has_sigma = true;
            } else if (prim.a == 1 && prim.b == 1 && prim.c == 1) {
                nbar = 3;
                sig = {0, -1, 1, 1};
                has_sigma = true;
            }
        } else if (!square) {
            auto [pt, pu] = pell_fundamental(Dp);
            t1 = pt;
            u1 = pu;
            auto m = automorph_matrix(prim, t1, u1);
            for (int k = 0; k < 4; ++k) {
                Integer mm = m[k] % N;
                if (mm < 0) mm += N;
                sig[k] = mm.convert_to<i64>();
            }
            has_sigma = true;
        }
        auto sig_apply = [&](int idx) {
            auto [x, y] = p1.reps[idx];
            return p1.classify(sig[0] * x + sig[1] * y, sig[2] * x + sig[3] * y);
        };

        std::vector<char> visited(p1.reps.size(), 0);
        for (int i = 0; i < static_cast<int>(p1.reps.size()); ++i) {
            if (visited[i]) continue;
            visited[i] = 1;
            i64 orbit_len = 1;
            if (has_sigma) {
                int j = sig_apply(i);
                int guard = 0;
                while (j != i) {
                    visited[j] = 1;
                    ++orbit_len;
                    j = sig_apply(j);
                    if (++guard > static_cast<int>(p1.reps.size()))
                        throw std::runtime_error("enumerate_classes: orbit overflow");
                }
            }
            SL2 g = p1.lift(i);
            BinaryQF q = q0.act(g);
            if (mod_reduce(q.a, N) != 0) continue;
            if (mod_reduce(q.b, 2 * N) != beta_c) continue;

            // cosmetic normalization by T^k (a Gamma_0(N) move)
            if (q.a != 0) {
                i64 k = -static_cast<i64>(std::llround(static_cast<double>(q.b) / (2.0 * q.a)));
                i64 step = 2 * q.a;
                while (std::abs(q.b + step * k) > std::abs(q.b + step * (k + 1))) ++k;
                while (std::abs(q.b + step * k) > std::abs(q.b + step * (k - 1))) --k;
                if (std::abs(q.b + step * k) == std::abs(q.b + step * (k + 1))) ++k;  // prefer +b
                q = q.act(SL2::T(k));
            } else if (q.b != 0) {
                i64 j0 = mod_reduce(q.c, std::abs(q.b));
                q = q.act(SL2::T((j0 - q.c) / q.b));
            }

            Gamma0Class cls;
            cls.form = q;
            cls.content = q.content();
            if (D < 0) {
                if (nbar % orbit_len != 0)
                    throw std::runtime_error("enumerate_classes: orbit length error");
                cls.stab_order = 2 * (nbar / orbit_len);
            } else if (square) {
                cls.stab_order = 2;
            } else {
                cls.infinite_stab = true;
                cls.stab_exponent = orbit_len;
                cls.disc_prim = Dp;
                auto [tk, uk] = automorph_power(t1, u1, Dp, orbit_len);
                cls.t_stab = tk;
                cls.u_stab = uk;
                // the class automorph must land in Gamma_0(N)
                Integer low = Integer(q.a / cls.content) * uk;
                if (low % N != 0)
                    throw std::runtime_error("enumerate_classes: automorph not in Gamma_0(N)");
            }
            out.classes.push_back(std::move(cls));
        }
    }
    std::sort(out.classes.begin(), out.classes.end(),
              [](const Gamma0Class& l, const Gamma0Class& r) { return l.form < r.form; });
    return out;
}

// Gamma_0(N)-class count weighted by 2/|stabilizer| for definite
// discriminants; the m = 0 value is the negative Eisenstein index -sigma_1(N)/6.
inline Rational hurwitz_class_number(i64 N, i64 beta, const Rational& m) {
    Level lev(N);
    if (m > 0) throw std::invalid_argument("hurwitz_class_number: need m <= 0");
    if (m == 0) {
        if (mod_reduce(beta, 2 * N) != 0)
            throw std::invalid_argument("hurwitz_class_number: m = 0 needs beta = 0");
        return Rational(-lev.sigma1(), 6);
    }
    Rational dd = m * 4 * N;
    if (boost::multiprecision::denominator(dd) != 1)
        throw std::invalid_argument("hurwitz_class_number: 4Nm not integral");
    i64 D = static_cast<i64>(boost::multiprecision::numerator(dd));
    ClassList cl = enumerate_classes(N, beta, D);
    Rational h = 0;
    for (const auto& c : cl.classes) h += Rational(2, c.stab_order);
    return h;
}

// ---------------------------------------------------------------------------
// Gamma_0(N) equivalence testing
// ---------------------------------------------------------------------------

namespace detail {

// Automorphs of a reduced positive definite form modulo {+-I}: trivial in
// general, of order 2 for the square shape [k,0,k] and of order 3 for the
// hexagonal shape [k,k,k].  Candidates are verified against the form, so the
// returned list is exactly Aut(r)/{+-I}.
inline std::vector<SL2> posdef_automorphs(const BinaryQF& r) {
    std::vector<SL2> out{SL2::identity()};
    for (const SL2& u : {SL2::S(), SL2{0, -1, 1, 1}, SL2{-1, -1, 1, 0}})
        if (r.act(u) == r) out.push_back(u);
    return out;
}

}  // namespace detail

// Whether `from` and `to` lie in one Gamma_0(N) orbit (equal nonzero
// discriminant required).  Both forms are carried to an SL_2(Z) canonical
// form with explicit witness matrices; the witness ambiguity is exactly the
// automorph group of the canonical form, which is scanned for a combination
// whose lower left entry is divisible by N.  For nonsquare D > 0 the
// automorph group is infinite cyclic modulo {+-I}, but only its finite image
// in SL_2(Z/N) matters for the divisibility test, so the scan stops as soon
// as the generator's powers cycle mod N.
inline bool gamma0_equivalent(i64 N, const BinaryQF& from, const BinaryQF& to) {
    if (N <= 0) throw std::invalid_argument("gamma0_equivalent: N must be positive");
    const i64 D = from.disc();
    if (D == 0 || to.disc() != D)
        throw std::invalid_argument("gamma0_equivalent: need equal nonzero discriminants");
    if (from.content() != to.content()) return false;

    if (D < 0) {
        if ((from.a > 0) != (to.a > 0)) return false;
        BinaryQF f = from, t = to;
        if (f.a < 0) {  // negate both; the witness set is unchanged
            f = BinaryQF{-f.a, -f.b, -f.c};
            t = BinaryQF{-t.a, -t.b, -t.c};
        }
        auto [r1, m1] = reduce_posdef(f);
        auto [r2, m2] = reduce_posdef(t);
        if (!(r1 == r2)) return false;
        for (const SL2& u : detail::posdef_automorphs(r1))
            if ((m1 * u * m2.inverse()).in_gamma0(N)) return true;
        return false;
    }

    if (i64 sq = 0; is_square(D, &sq)) {
        auto [r1, m1] = square_canonical(from);
        auto [r2, m2] = square_canonical(to);
        if (!(r1 == r2)) return false;
        return (m1 * m2.inverse()).in_gamma0(N);
    }

    auto [r1, m1] = reduce_indef(from);
    auto [r2, m2] = reduce_indef(to);
    BinaryQF q = r1;
    SL2 walk = SL2::identity();
    if (!(q == r2)) {
        bool met = false;
        for (int guard = 0; guard < 200000 && !met; ++guard) {
            walk = walk * rho_step_indef(q);
            if (q == r2) met = true;
            else if (q == r1) return false;  // cycle closed without meeting r2
        }
        if (!met) throw std::runtime_error("gamma0_equivalent: reduction cycle did not close");
    }
    // from.(m1 walk) = r2 and to.m2 = r2, so the witnesses are exactly
    // m1 walk U m2^{-1} with U an automorph of r2.
    const SL2 left = m1 * walk;
    const SL2 right = m2.inverse();
    const BinaryQF prim = r2.divided_by(r2.content());
    auto [t1, u1] = pell_fundamental(prim.disc());
    const auto aut = automorph_matrix(prim, t1, u1);
    auto modn = [N](const Integer& v) {
        Integer w = v % N;
        if (w < 0) w += N;
        return w.convert_to<i64>();
    };
    using M4 = std::array<i64, 4>;
    const M4 A{modn(aut[0]), modn(aut[1]), modn(aut[2]), modn(aut[3])};
    const M4 L{mod_reduce(left.a, N), mod_reduce(left.b, N), mod_reduce(left.c, N),
               mod_reduce(left.d, N)};
    const M4 R{mod_reduce(right.a, N), mod_reduce(right.b, N), mod_reduce(right.c, N),
               mod_reduce(right.d, N)};
    auto mul = [N](const M4& x, const M4& y) {
        return M4{mod_reduce(x[0] * y[0] + x[1] * y[2], N),
                  mod_reduce(x[0] * y[1] + x[1] * y[3], N),
                  mod_reduce(x[2] * y[0] + x[3] * y[2], N),
                  mod_reduce(x[2] * y[1] + x[3] * y[3], N)};
    };
    const M4 ident{mod_reduce(1, N), 0, 0, mod_reduce(1, N)};
    M4 P = ident;
    for (int guard = 0; guard < 4000000; ++guard) {
        M4 W = mul(mul(L, P), R);
        if (W[2] == 0) return true;
        P = mul(P, A);
        if (P == ident) return false;  // scanned the full cyclic image mod N
    }
    throw std::runtime_error("gamma0_equivalent: automorph image did not cycle");
}

// ---------------------------------------------------------------------------
// Geometry: CM points, hyperbolic distances, majorants
// ---------------------------------------------------------------------------

// Root of a x^2 + b x + c in the upper half plane (D < 0, a != 0):
//   z_Q = (-b + i sqrt(|D|)) / (2a), using |a| so that Im > 0 for either sign.
template <typename T>
cplx<T> heegner_point(const BinaryQF& q) {
    using std::sqrt;
    i64 D = q.disc();
    if (D >= 0 || q.a == 0)
        throw std::invalid_argument("heegner_point: need D < 0, a != 0");
    T sd = sqrt(T(-D));
    return {T(-q.b) / (2 * q.a), sd / (2 * std::abs(q.a))};
}

template <typename T>
T cosh_dist(const cplx<T>& z, const cplx<T>& w) {
    return T(1) + norm(z - w) / (2 * z.im * w.im);
}

// sinh of the distance from z to the geodesic {a|z|^2 + b x + c = 0} of a
// form with D > 0 (vertical line when a == 0):
//   sinh d = |a |z|^2 + b x + c| / (y sqrt(D)).
template <typename T>
T sinh_dist_geodesic(const BinaryQF& q, const cplx<T>& z) {
    using std::abs;
    using std::sqrt;
    i64 D = q.disc();
    if (D <= 0) throw std::invalid_argument("sinh_dist_geodesic: need D > 0");
    T val = q.a * norm(z) + q.b * z.re + q.c;
    return abs(val) / (z.im * sqrt(T(D)));
}

// Majorant Q(X_z) >= 0 of the level-N vector attached to the form:
//   Q(X_z) = m + (a |z|^2 + b x + c)^2 / (4 N y^2),    m = D / (4N).
// Closed forms: m cosh^2 d(z, geodesic) for m > 0, |m| sinh^2 d(z, z_Q) for
// m < 0, and the square of a cusp-distance for m = 0.
template <typename T>
T majorant(i64 N, const BinaryQF& q, const Rational& m, const cplx<T>& z) {
    if (N <= 0) throw std::invalid_argument("majorant: N must be positive");
    Rational mq(q.disc(), 4 * N);
    if (mq != m) throw std::invalid_argument("majorant: m != disc/(4N)");
    T val = q.a * norm(z) + q.b * z.re + q.c;
    return from_rational<T>(m) + val * val / (4 * N * z.im * z.im);
}

}  // namespace eisenkron
