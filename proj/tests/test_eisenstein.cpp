#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include <eisenkron/eisenstein.hpp>

using namespace eisenkron;

namespace {

using C = cplx<double>;

// every SL_2(Z) matrix with |entries| <= H (independent of the library's
// coset machinery: built row by row from the extended gcd)
std::vector<SL2> sl2_box(i64 H) {
    std::set<std::array<i64, 4>> seen;
    std::vector<SL2> out;
    auto push = [&](i64 a, i64 b, i64 c, i64 d) {
        if (std::abs(a) > H || std::abs(b) > H) return;
        if (seen.insert({a, b, c, d}).second) out.push_back(SL2{a, b, c, d});
    };
    for (i64 cc = -H; cc <= H; ++cc)
        for (i64 dd = -H; dd <= H; ++dd) {
            if (cc == 0 && dd == 0) continue;
            if (cc == 0) {
                if (std::abs(dd) != 1) continue;
                for (i64 b = -H; b <= H; ++b) push(dd, b, 0, dd);
                continue;
            }
            i64 x = 0, y = 0;
            if (ext_gcd(dd, -cc, x, y) != 1) continue;
            i64 kr = (2 * H + std::abs(x)) / std::abs(cc) + 2;
            for (i64 k = -kr; k <= kr; ++k) push(x + k * cc, y + k * dd, cc, dd);
        }
    return out;
}

double min_dist_to_geodesic_by_search(const BinaryQF& q, const C& z) {
    auto dist_at = [&](double t) {
        C w;
        if (q.a != 0) {
            const double cx = -double(q.b) / (2 * q.a);
            const double r = std::sqrt(double(q.disc())) / (2 * std::abs(double(q.a)));
            w = C{cx + r * std::cos(t), r * std::sin(t)};
        } else {
            w = C{-double(q.c) / double(q.b), std::exp(t)};
        }
        return hyperbolic_distance(z, w);
    };
    double lo = q.a != 0 ? 1e-9 : -14.0;
    double hi = q.a != 0 ? std::acos(-1.0) - 1e-9 : 14.0;
    for (int it = 0; it < 300; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (dist_at(m1) < dist_at(m2)) hi = m2;
        else lo = m1;
    }
    return dist_at((lo + hi) / 2);
}

}  // namespace

TEST_CASE("gamma0_equivalent decides orbit membership") {
    std::mt19937_64 rng(77);
    using Tup = std::tuple<i64, i64, i64>;
    for (const auto& [N, beta, D] :
         {Tup{6, 1, -23}, Tup{6, 2, 28}, Tup{6, 1, 1}, Tup{10, 3, 9}, Tup{1, 0, -4},
          Tup{1, 1, 145}, Tup{6, 5, 145}}) {
        ClassList cl = enumerate_classes(N, beta, D);
        REQUIRE(!cl.classes.empty());
        for (const auto& c : cl.classes)
            for (int t = 0; t < 8; ++t) {
                SL2 g = random_gamma0(N, rng);
                INFO("N=" << N << " D=" << D << " rep " << c.form);
                REQUIRE(gamma0_equivalent(N, c.form, gamma0_act(N, c.form, g)));
            }
        for (size_t i = 0; i < cl.classes.size(); ++i)
            for (size_t j = 0; j < cl.classes.size(); ++j) {
                INFO("N=" << N << " D=" << D << " reps " << cl.classes[i].form << " vs "
                          << cl.classes[j].form);
                REQUIRE(gamma0_equivalent(N, cl.classes[i].form, cl.classes[j].form) == (i == j));
                // translated representatives keep the verdict
                SL2 g = random_gamma0(N, rng);
                REQUIRE(gamma0_equivalent(N, gamma0_act(N, cl.classes[i].form, g),
                                          cl.classes[j].form) == (i == j));
            }
    }

    // same discriminant, different content: never equivalent
    REQUIRE(!gamma0_equivalent(1, BinaryQF{1, 0, 4}, BinaryQF{2, 0, 2}));

    // definite forms of opposite sign are inequivalent
    REQUIRE(!gamma0_equivalent(1, BinaryQF{1, 0, 1}, BinaryQF{-1, 0, -1}));
    // but negating both members changes nothing
    REQUIRE(gamma0_equivalent(6, BinaryQF{-6, -1, -1}, BinaryQF{-6, -1, -1}));

    // the level-N classification is strictly finer than the SL_2(Z) one:
    // these pairs share a reduced form yet Gamma_0(6) preserves b mod 12,
    // so the witness scan after the common reduction must come up empty
    REQUIRE((reduce_posdef(BinaryQF{6, 1, 1}).first == reduce_posdef(BinaryQF{6, -1, 1}).first));
    REQUIRE(!gamma0_equivalent(6, BinaryQF{6, 1, 1}, BinaryQF{6, -1, 1}));
    REQUIRE(!gamma0_equivalent(6, BinaryQF{6, 2, -1}, BinaryQF{6, -2, -1}));

    // discriminant mismatch and zero discriminant are rejected
    REQUIRE_THROWS_AS(gamma0_equivalent(6, BinaryQF{6, 2, -1}, BinaryQF{6, 1, 1}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(gamma0_equivalent(6, BinaryQF{6, 12, 6}, BinaryQF{6, 12, 6}),
                      std::invalid_argument);
}

TEST_CASE("lattice enumeration is exact and monotone") {
    struct Case {
        i64 N, beta, D;
    };
    const C z{0.31, 0.92};
    for (const Case& cs : {Case{1, 0, -4}, Case{6, 1, 1}, Case{6, 1, -23}, Case{6, 2, 28},
                           Case{1, 0, 0}, Case{6, 0, 0}, Case{1, 1, 145}}) {
        Level lv(cs.N);
        const Rational m(cs.D, 4 * cs.N);
        // shift the caps by the minimal possible majorant so every case has terms
        const double floor_m = std::max(0.0, double(cs.D) / (4 * cs.N));
        const double cap1 = 30.0 + floor_m, cap2 = 120.0 + floor_m;
        std::map<BinaryQF, double> small, large;
        detail::for_each_lattice_form(lv, cs.beta, cs.D, z, cap1,
                                      [&](const BinaryQF& q, double maj) {
            INFO("N=" << cs.N << " D=" << cs.D << " form " << q);
            REQUIRE(small.emplace(q, maj).second);  // no duplicates
            REQUIRE(mod_reduce(q.a, cs.N) == 0);
            REQUIRE(mod_reduce(q.b, 2 * cs.N) == mod_reduce(cs.beta, 2 * cs.N));
            REQUIRE(q.disc() == cs.D);
            REQUIRE(!(q.a == 0 && q.b == 0 && q.c == 0));
            REQUIRE(maj <= cap1);
            REQUIRE(std::abs(maj - majorant(cs.N, q, m, z)) < 1e-11);
        });
        detail::for_each_lattice_form(lv, cs.beta, cs.D, z, cap2,
                                      [&](const BinaryQF& q, double maj) {
            large.emplace(q, maj);
        });
        REQUIRE(!small.empty());
        REQUIRE(large.size() > small.size());
        // the small-cap set is exactly the low slice of the large-cap set
        for (const auto& [q, maj] : large) {
            INFO("N=" << cs.N << " D=" << cs.D << " form " << q << " maj " << maj);
            REQUIRE(small.count(q) == (maj <= cap1 ? 1u : 0u));
        }
        for (const auto& [q, maj] : small) {
            (void)maj;
            REQUIRE(large.count(q) == 1);
        }
        // when beta = -beta mod 2N the set is symmetric under negation
        if (mod_reduce(2 * cs.beta, 2 * cs.N) == 0)
            for (const auto& [q, maj] : large) {
                (void)maj;
                REQUIRE(large.count(BinaryQF{-q.a, -q.b, -q.c}) == 1);
            }
    }

    // hand-picked members are found
    std::set<BinaryQF> got;
    detail::for_each_lattice_form(Level(6), 1, 1, z, 40.0,
                                  [&](const BinaryQF& q, double) { got.insert(q); });
    REQUIRE(got.count(BinaryQF{0, 1, 0}) == 1);
    REQUIRE(got.count(BinaryQF{6, 1, 0}) == 1);
    REQUIRE(got.count(BinaryQF{-6, 1, 0}) == 1);
    got.clear();
    detail::for_each_lattice_form(Level(1), 0, -4, z, 40.0,
                                  [&](const BinaryQF& q, double) { got.insert(q); });
    REQUIRE(got.count(BinaryQF{1, 0, 1}) == 1);
    REQUIRE(got.count(BinaryQF{-1, 0, -1}) == 1);
    REQUIRE(got.count(BinaryQF{2, 2, 1}) == 1);
    REQUIRE(got.count(BinaryQF{5, 4, 1}) == 1);
    got.clear();
    detail::for_each_lattice_form(Level(6), 0, 0, z, 40.0,
                                  [&](const BinaryQF& q, double) { got.insert(q); });
    REQUIRE(got.count(BinaryQF{6, 0, 0}) == 1);
    REQUIRE(got.count(BinaryQF{0, 0, 1}) == 1);
    REQUIRE(got.count(BinaryQF{6, 12, 6}) == 1);
}

TEST_CASE("parabolic series matches a direct coprime-pair sum at level one") {
    Level lv(1);
    const C z{0.3, 1.1};
    const C s{2.0, 0.0};
    const double H = 40.0;
    const auto e = parabolic_eisenstein(lv, 1, z, s, H);

    double acc = 0;
    for (i64 u = 0; u <= 100; ++u)
        for (i64 v = -200; v <= 200; ++v) {
            if (u == 0 && v <= 0) continue;  // one of each sign pair
            if (std::gcd(u, std::abs(v)) != 1) continue;
            const double re = double(u) * z.re + double(v);
            const double n2 = re * re + double(u) * double(u) * z.im * z.im;
            if (n2 > H * H) continue;
            acc += std::pow(z.im / n2, 2.0);
        }
    REQUIRE(std::abs(e.value.re - acc) < 1e-12);
    REQUIRE(std::abs(e.value.im) < 1e-15);

    // growing the bound moves the value by less than the reported tail
    const C zi{0.0, 1.0};
    const auto e1 = parabolic_eisenstein(lv, 1, zi, s, 1000.0);
    const auto e2 = parabolic_eisenstein(lv, 1, zi, s, 2000.0);
    REQUIRE(abs(e2.value - e1.value) <= e1.est_tail);
    REQUIRE(abs(e2.value - e1.value) < 1e-6);
}

TEST_CASE("parabolic coset rows match the cusp subgroup structure") {
    for (i64 N : {6, 10}) {
        Level lv(N);
        for (i64 c : lv.divs) {
            auto admissible = [&](i64 u, i64 v) {
                if (u == 0) return c == N && std::abs(v) == 1;
                return mod_reduce(u, c) == 0 && std::gcd(std::abs(u), N / c) == 1 &&
                       std::gcd(std::abs(u), std::abs(v)) == 1;
            };

            // (a) the bottom row of every conjugated group element is admissible
            std::mt19937_64 rng(1000 + 10 * N + c);
            for (int t = 0; t < 200; ++t) {
                const SL2 M = random_gamma0(N, rng);
                const i64 u = -c * M.a + M.c, v = -c * M.b + M.d;
                INFO("N=" << N << " c=" << c << " row (" << u << "," << v << ")");
                REQUIRE(admissible(u, v));
            }

            // (b) every admissible row in a box is realized by a constructed witness
            for (i64 u = -30; u <= 30; ++u)
                for (i64 v = -30; v <= 30; ++v) {
                    if (!admissible(u, v)) continue;
                    if (u == 0 && v == -1) continue;  // sign twin of (0, 1)
                    INFO("N=" << N << " c=" << c << " row (" << u << "," << v << ")");
                    bool constructed = false;
                    if (u == 0) {
                        const SL2 M{1, 0, N, 1};
                        REQUIRE(-c * M.a + M.c == 0);
                        REQUIRE(-c * M.b + M.d == 1);
                        constructed = true;
                    } else {
                        i64 x = 0, y = 0;
                        REQUIRE(ext_gcd(v, u, x, y) == 1);  // x v + y u = 1
                        for (i64 t = 0; t < N && !constructed; ++t) {
                            const i64 a = x + t * u, b = -y + t * v;
                            const i64 u2 = u + c * a, v2 = v + c * b;
                            if (mod_reduce(u2, N) != 0) continue;
                            const SL2 M{a, b, u2, v2};
                            REQUIRE(M.in_gamma0(N));
                            REQUIRE(-c * M.a + M.c == u);
                            REQUIRE(-c * M.b + M.d == v);
                            constructed = true;
                        }
                    }
                    REQUIRE(constructed);
                }

            // (c) the parabolic generator of the cusp fixes its row exactly
            const SL2 g{1 - N, N / c, -N * c, N + 1};
            REQUIRE(g.in_gamma0(N));
            REQUIRE(g.a + g.d == 2);  // parabolic
            REQUIRE(-c * g.a + g.c == -c);
            REQUIRE(-c * g.b + g.d == 1);

            // (d) non-proportional rows sit in different stabilizer cosets:
            //     gamma = M2 M1^{-1} then fixes 1/c iff c(a + c b) = cc + c d
            std::mt19937_64 rng2(9000 + 10 * N + c);
            for (int t = 0; t < 100; ++t) {
                const SL2 M1 = random_gamma0(N, rng2), M2 = random_gamma0(N, rng2);
                const i64 u1 = -c * M1.a + M1.c, v1 = -c * M1.b + M1.d;
                const i64 u2 = -c * M2.a + M2.c, v2 = -c * M2.b + M2.d;
                const SL2 gam = M2 * M1.inverse();
                const bool fixes = c * (gam.a + c * gam.b) == gam.c + c * gam.d;
                const bool proportional = u1 * v2 - u2 * v1 == 0;
                INFO("N=" << N << " c=" << c << " rows (" << u1 << "," << v1 << ") ("
                          << u2 << "," << v2 << ")");
                REQUIRE(fixes == proportional);
            }

            // (e) the coset term equals the local height of the scaled cusp
            CuspScaling sc(N, c);
            std::mt19937_64 rng3(5000 + 10 * N + c);
            const C z{0.21, 0.73};
            for (int t = 0; t < 50; ++t) {
                const SL2 M = random_gamma0(N, rng3);
                const i64 u = -c * M.a + M.c, v = -c * M.b + M.d;
                const C uzv = double(u) * z + C{double(v), 0.0};
                const double term = double(c) / double(N) * z.im / norm(uzv);
                REQUIRE(std::abs(sc.im_inv(M.moebius(z)) - term) < 1e-12);
            }
        }
    }
}

TEST_CASE("hyperbolic distance agrees with direct geometry") {
    REQUIRE(std::abs(hyperbolic_distance(C{0.0, 1.0}, C{0.0, 2.0}) - std::log(2.0)) < 1e-14);
    REQUIRE(hyperbolic_distance(C{0.4, 0.7}, C{0.4, 0.7}) == 0.0);

    std::mt19937_64 rng(4321);
    std::uniform_real_distribution<double> dx(-2.0, 2.0), dy(0.2, 3.0);
    for (int t = 0; t < 40; ++t) {
        const C a{dx(rng), dy(rng)}, b{dx(rng), dy(rng)};
        REQUIRE(std::abs(hyperbolic_distance(a, b) - hyperbolic_distance(b, a)) < 1e-13);
        const SL2 g = random_gamma0(1, rng);
        REQUIRE(std::abs(hyperbolic_distance(g.moebius(a), g.moebius(b)) -
                         hyperbolic_distance(a, b)) < 1e-9);
    }

    // point-to-geodesic distance vs a ternary search along the geodesic
    for (const BinaryQF& q : {BinaryQF{1, 0, -1}, BinaryQF{0, 1, 0}, BinaryQF{1, 3, 1},
                              BinaryQF{6, 1, -1}}) {
        for (const C& z : {C{0.45, 1.3}, C{-1.2, 0.6}, C{2.2, 2.4}}) {
            const double direct = hyperbolic_distance_to_geodesic(q, z);
            const double searched = min_dist_to_geodesic_by_search(q, z);
            INFO("form " << q << " z = " << z.re << "+" << z.im << "i");
            REQUIRE(std::abs(direct - searched) < 1e-9);
        }
    }

    // majorant bridges, m > 0: q_z = m cosh^2(distance to the geodesic)
    {
        const C z{0.37, 1.14};
        const BinaryQF q1{1, 3, 1};  // level 1, disc 5
        const double d1 = hyperbolic_distance_to_geodesic(q1, z);
        REQUIRE(std::abs(majorant(1, q1, Rational(5, 4), z) -
                         5.0 / 4 * std::cosh(d1) * std::cosh(d1)) < 1e-12);
        const BinaryQF q6{6, 1, -1};  // level 6, disc 25
        const double d6 = hyperbolic_distance_to_geodesic(q6, z);
        REQUIRE(std::abs(majorant(6, q6, Rational(25, 24), z) -
                         25.0 / 24 * std::cosh(d6) * std::cosh(d6)) < 1e-12);
    }

    // majorant bridges, m < 0: q_z = |m| sinh^2(distance to the CM point)
    {
        const C z{0.37, 1.14};
        const BinaryQF q1{1, 0, 1};
        const double d1 = hyperbolic_distance(z, heegner_point<double>(q1));
        REQUIRE(std::abs(majorant(1, q1, Rational(-1), z) -
                         std::sinh(d1) * std::sinh(d1)) < 1e-12);
        const BinaryQF q6{6, 1, 1};  // disc -23
        const double d6 = hyperbolic_distance(z, heegner_point<double>(q6));
        REQUIRE(std::abs(majorant(6, q6, Rational(-23, 24), z) -
                         23.0 / 24 * std::sinh(d6) * std::sinh(d6)) < 1e-12);
    }

    // majorant bridge, m = 0: for the primitive vector vanishing at the cusp
    // 1/c, the majorant is (1/4N) (local height)^{-2}
    for (i64 N : {1, 6, 10}) {
        Level lv(N);
        for (i64 c : lv.divs) {
            const BinaryQF q{N * c, -2 * N, N / c};
            REQUIRE(q.disc() == 0);
            CuspScaling sc(N, c);
            for (const C& z : {C{0.2, 0.9}, C{-0.7, 0.35}}) {
                const double h = sc.im_inv(z);
                INFO("N=" << N << " c=" << c);
                REQUIRE(std::abs(majorant(N, q, Rational(0), z) - 1.0 / (4 * N * h * h)) <
                        1e-12);
            }
        }
    }
}

TEST_CASE("elliptic series matches full-group distance sums") {
    const C s{2.6, 0.0};

    // level 1, CM point i, stabilizer of order 4
    {
        Level lv(1);
        const BinaryQF q{1, 0, 1};
        const C z{0.37, 1.21};
        const double R = 3.0;
        const auto e = elliptic_eisenstein(lv, q, z, s, R);
        const C w{0.0, 1.0};
        auto box_sum = [&](i64 H) {
            double acc = 0;
            for (const SL2& M : sl2_box(H)) {
                const double ch = cosh_dist(M.moebius(z), w);
                const double sh2 = ch * ch - 1;
                if (sh2 > R * R) continue;
                acc += std::pow(sh2, -s.re / 2);
            }
            return acc;
        };
        const double b40 = box_sum(40), b70 = box_sum(70);
        REQUIRE(std::abs(b40 - b70) < 1e-12);  // the box is complete for this cap
        REQUIRE(std::abs(b70 / 4 - e.value.re) < 1e-10);
        REQUIRE(std::abs(e.value.im) < 1e-14);
    }

    // level 6, class of disc -23, trivial stabilizer (order 2 with -I)
    {
        Level lv(6);
        const ClassList cl = enumerate_classes(6, 1, -23);
        const BinaryQF q = cl.classes.front().form;
        REQUIRE(cl.classes.front().stab_order == 2);
        const C z{0.19, 0.81};
        const double R = 1.5;
        const auto e = elliptic_eisenstein(lv, q, z, s, R);
        const C w = heegner_point<double>(q);
        auto box_sum = [&](i64 H) {
            double acc = 0;
            for (const SL2& M : sl2_box(H)) {
                if (!M.in_gamma0(6)) continue;
                const double ch = cosh_dist(M.moebius(z), w);
                const double sh2 = ch * ch - 1;
                if (sh2 > R * R) continue;
                acc += std::pow(sh2, -s.re / 2);
            }
            return acc;
        };
        const double b40 = box_sum(40), b80 = box_sum(80);
        REQUIRE(std::abs(b40 - b80) < 1e-12);
        REQUIRE(std::abs(b80 / 2 - e.value.re) < 1e-10);
    }

    // near the CM point the closest-point term dominates
    {
        const C near{0.02, 1.03};
        const auto e = elliptic_eisenstein(Level(1), BinaryQF{1, 0, 1}, near, s, 6.0);
        const double d0 = hyperbolic_distance(near, C{0.0, 1.0});
        const double lead = std::pow(std::sinh(d0), -s.re);
        REQUIRE(e.value.re > lead);
        REQUIRE((e.value.re - lead) / e.value.re < 0.5);
    }

    // at the CM point itself the series is singular
    REQUIRE_THROWS_AS(elliptic_eisenstein(Level(1), BinaryQF{1, 0, 1}, C{0.0, 1.0}, s, 5.0),
                      std::domain_error);
}

TEST_CASE("elliptic classes partition the definite lattice forms") {
    const C s{2.6, 0.0};
    using Tup = std::tuple<i64, i64, i64>;
    for (const auto& [N, beta, D] : {Tup{1, 0, -4}, Tup{1, 1, -23}, Tup{6, 1, -23}}) {
        Level lv(N);
        const C z{0.23, 0.88};
        const double R = 20.0;
        const double am = -double(D) / (4 * N);

        C class_sum{};
        for (i64 sign : {+1, -1}) {
            const ClassList cl = enumerate_classes(N, sign * beta, D);
            for (const auto& c : cl.classes)
                class_sum += elliptic_eisenstein(lv, c.form, z, s, R).value;
        }

        C direct{};
        detail::for_each_lattice_form(lv, beta, D, z, am * R * R,
                                      [&](const BinaryQF&, double maj) {
            direct += C{std::pow(maj / am, -s.re / 2), 0.0};
        });
        INFO("N=" << N << " beta=" << beta << " D=" << D);
        REQUIRE(abs(class_sum - direct) < 1e-10);
        REQUIRE(abs(class_sum) > 0.1);  // the comparison is not vacuous
    }
}

TEST_CASE("hyperbolic series matches geometry and partitions the lattice") {
    const C s{2.6, 0.0};

    // a point on the geodesic contributes the maximal term 1
    {
        const BinaryQF q{1, 0, -1};
        const C z{std::cos(1.1), std::sin(1.1)};  // |z| = 1
        REQUIRE(std::abs(majorant(1, q, Rational(1), z) - 1.0) < 1e-13);
        const auto e = hyperbolic_eisenstein(Level(1), q, z, s, 10.0);
        REQUIRE(e.value.re > 1.0);
    }

    // full-group box sum against the vertical-axis form at level 1
    {
        Level lv(1);
        const BinaryQF q{0, 1, 0};
        const C z{0.42, 1.37};
        const double B = 3.0;  // cosh cap
        const auto e = hyperbolic_eisenstein(lv, q, z, s, B);
        auto box_sum = [&](i64 H) {
            double acc = 0;
            for (const SL2& M : sl2_box(H)) {
                const C mz = M.moebius(z);
                const double sh = sinh_dist_geodesic(q, mz);
                const double ch2 = 1 + sh * sh;
                if (ch2 > B * B) continue;
                acc += std::pow(ch2, -s.re / 2);
            }
            return acc;
        };
        const double b40 = box_sum(40), b80 = box_sum(80);
        REQUIRE(std::abs(b40 - b80) < 1e-12);
        REQUIRE(std::abs(b80 / 2 - e.value.re) < 1e-10);
    }

    // class sums equal the direct lattice sum (completeness of the class
    // decomposition and soundness of the equivalence filter)
    using Tup = std::tuple<i64, i64, i64>;
    for (const auto& [N, beta, D] : {Tup{1, 1, 1}, Tup{6, 1, 1}, Tup{1, 1, 145}, Tup{6, 2, 28}}) {
        Level lv(N);
        const C z{0.27, 0.83};
        const double B = 12.0;
        const double m = double(D) / (4 * N);

        C class_sum{};
        const ClassList cl = enumerate_classes(N, beta, D);
        for (const auto& c : cl.classes)
            class_sum += hyperbolic_eisenstein(lv, c.form, z, s, B).value;

        C direct{};
        detail::for_each_lattice_form(lv, beta, D, z, m * B * B,
                                      [&](const BinaryQF&, double maj) {
            direct += C{std::pow(maj / m, -s.re / 2), 0.0};
        });
        INFO("N=" << N << " beta=" << beta << " D=" << D);
        REQUIRE(abs(class_sum - direct) < 1e-10);
        REQUIRE(abs(class_sum) > 0.1);
    }
}

TEST_CASE("lattice sum is stable under bound doubling and extrapolates") {
    const C s{1.4, 0.0};
    const C z{0.27, 0.83};
    struct Case {
        i64 N, beta;
        Rational m;
    };
    for (const Case& cs : {Case{1, 0, Rational(-1)}, Case{6, 1, Rational(1, 24)},
                           Case{6, 0, Rational(0)}, Case{6, 1, Rational(-23, 24)}}) {
        Level lv(cs.N);
        const auto a = lattice_sum(lv, cs.beta, cs.m, z, s, 400.0);
        const auto b = lattice_sum(lv, cs.beta, cs.m, z, s, 800.0);
        INFO("N=" << cs.N << " beta=" << cs.beta << " m=" << cs.m);
        REQUIRE(abs(b.value - a.value) <= a.est_tail);

        const auto e1 = lattice_sum_extrapolated(lv, cs.beta, cs.m, z, s, 400.0);
        const auto e2 = lattice_sum_extrapolated(lv, cs.beta, cs.m, z, s, 800.0);
        // the extrapolants drift by much less than the raw doubling step
        REQUIRE(abs(e2.value - e1.value) < abs(b.value - a.value) + 1e-12);
        REQUIRE(abs(e2.value - e1.value) <= 4 * e1.est_tail + 1e-8);
    }

    // the sum is singular when z is a CM point of the lattice
    REQUIRE_THROWS_AS(lattice_sum(Level(1), 0, Rational(-1), C{0.0, 1.0}, s, 50.0),
                      std::domain_error);
}

TEST_CASE("lattice sum equals its Eisenstein average in all three signatures") {
    const C s{1.3, 0.0};
    const C z{0.27, 0.83};
    struct Case {
        i64 N, beta;
        Rational m;
        const char* kind;
    };
    for (const Case& cs : {Case{1, 0, Rational(0), "parabolic N=1"},
                           Case{6, 0, Rational(0), "parabolic N=6"},
                           Case{6, 1, Rational(1, 24), "hyperbolic N=6 D=1"},
                           Case{1, 0, Rational(-1), "elliptic N=1 D=-4"},
                           Case{6, 1, Rational(-23, 24), "elliptic N=6 D=-23"}}) {
        Level lv(cs.N);
        INFO(cs.kind);

        // the test point stays clear of the singular loci at this cap
        if (cs.m != 0) {
            double min_maj = 1e9;
            const Rational d4 = cs.m * 4 * cs.N;
            const i64 D = static_cast<i64>(boost::multiprecision::numerator(d4));
            detail::for_each_lattice_form(lv, cs.beta, D, z, 50.0,
                                          [&](const BinaryQF&, double maj) {
                min_maj = std::min(min_maj, maj);
            });
            REQUIRE(min_maj > 1e-3);
        }

        const auto lhs = lattice_sum_extrapolated(lv, cs.beta, cs.m, z, s, 2500.0);
        const auto rhs = averaged_eisenstein_side(lv, cs.beta, cs.m, z, s, 40000.0);
        REQUIRE(abs(lhs.value - rhs.value) < 1e-3);
        REQUIRE(lhs.est_tail < 5e-4);
        REQUIRE(rhs.est_tail < 5e-4);
    }
}

TEST_CASE("series are invariant under the group action") {
    Level lv(6);
    const C s{2.4, 0.0};
    const C z{0.31, 0.77};
    const BinaryQF qh = enumerate_classes(6, 2, 28).classes.front().form;
    const BinaryQF qe = enumerate_classes(6, 1, -23).classes.front().form;

    std::mt19937_64 rng(2024);
    for (int t = 0; t < 5; ++t) {
        SL2 g = random_gamma0(6, rng);
        C gz = g.moebius(z);
        while (gz.im < 0.15) {
            g = random_gamma0(6, rng);
            gz = g.moebius(z);
        }

        const auto pa = parabolic_eisenstein(lv, 2, z, s, 120.0);
        const auto pb = parabolic_eisenstein(lv, 2, gz, s, 120.0);
        REQUIRE(abs(pa.value - pb.value) <= 2 * (pa.est_tail + pb.est_tail) + 1e-12);

        // the orbit evaluators enumerate identical term sets at z and gz
        const auto ha = hyperbolic_eisenstein(lv, qh, z, s, 25.0);
        const auto hb = hyperbolic_eisenstein(lv, qh, gz, s, 25.0);
        REQUIRE(abs(ha.value - hb.value) < 1e-10);

        const auto ea = elliptic_eisenstein(lv, qe, z, s, 8.0);
        const auto eb = elliptic_eisenstein(lv, qe, gz, s, 8.0);
        REQUIRE(abs(ea.value - eb.value) < 1e-10);
    }

    // the level inversion z -> -1/(Nz) swaps the cusps 1/c and 1/(N/c)
    const C w = C{-1.0, 0.0} / (C{double(lv.N), 0.0} * z);
    for (i64 c : lv.divs) {
        const auto f1 = parabolic_eisenstein(lv, c, w, s, 150.0);
        const auto f2 = parabolic_eisenstein(lv, lv.N / c, z, s, 150.0);
        INFO("c=" << c);
        REQUIRE(abs(f1.value - f2.value) <= 2 * (f1.est_tail + f2.est_tail) + 1e-12);
    }
}

TEST_CASE("eisenstein evaluators validate their input") {
    Level lv(6);
    const C z{0.2, 0.9};
    const C good{1.5, 0.0};
    const C bad{0.9, 3.0};
    REQUIRE_THROWS_AS(parabolic_eisenstein(lv, 4, z, good, 50.0), std::invalid_argument);
    REQUIRE_THROWS_AS(parabolic_eisenstein(lv, 2, z, bad, 50.0), std::domain_error);
    REQUIRE_THROWS_AS(parabolic_eisenstein(lv, 2, C{0.2, -0.9}, good, 50.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(parabolic_eisenstein(lv, 2, z, good, -1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(hyperbolic_eisenstein(lv, BinaryQF{6, 1, 1}, z, good, 10.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(hyperbolic_eisenstein(lv, BinaryQF{1, 0, -1}, z, good, 10.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(hyperbolic_eisenstein(lv, BinaryQF{6, 2, -1}, z, good, 0.5),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(hyperbolic_eisenstein(lv, BinaryQF{6, 2, -1}, z, bad, 10.0),
                      std::domain_error);
    REQUIRE_THROWS_AS(elliptic_eisenstein(lv, BinaryQF{6, 2, -1}, z, good, 5.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(elliptic_eisenstein(lv, BinaryQF{-6, 1, -1}, z, good, 5.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(elliptic_eisenstein(lv, BinaryQF{3, 2, 1}, z, good, 5.0),
                      std::invalid_argument);  // leading coefficient not divisible by N
    REQUIRE_THROWS_AS(lattice_sum(lv, 1, Rational(1, 7), z, good, 50.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(lattice_sum(lv, 0, Rational(1, 24), z, good, 50.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(averaged_eisenstein_side(lv, 1, Rational(0), z, good, 50.0),
                      std::invalid_argument);
}
