#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "xyzsep/factorization.hpp"
#include "xyzsep/hilbert.hpp"
#include "xyzsep/spectrum.hpp"

using namespace xyzsep;
using Catch::Matchers::WithinAbs;

namespace {
const Couplings kXY{1.0, 0.5, 0.0};
const Couplings kA{1.0, 0.5, 0.25};   // jz < jy
const Couplings kC{1.0, 0.5, 0.5};    // jz = jy
const Couplings kB{1.0, 0.5, 0.75};   // jz > jy

std::vector<double> sample_h1(const Couplings& j, int count, std::mt19937& rng) {
    double lo = -j.jz + 0.05, hi = 3.0;
    if (j.jz > j.jy) lo = std::sqrt(j.jz * j.jz - j.jy * j.jy) + 0.02;
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(count);
    for (auto& x : out) x = u(rng);
    return out;
}
}  // namespace

TEST_CASE("curve residual closed form") {
    CHECK_THAT(curve_residual(1.0, 0.5, kXY), WithinAbs(0.0, 1e-15));
    const double v = std::sqrt(0.1875);
    CHECK_THAT(curve_residual(v, v, kA), WithinAbs(0.0, 1e-15));
    CHECK_THAT(curve_residual(0.0, 0.0, kA), WithinAbs(0.5, 1e-15));  // 1.5 - 0.5 - 0.5
}

TEST_CASE("curve residual symmetries") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 200; ++t) {
        const Couplings j{1.0, u(rng) / 4, u(rng) / 3};
        const double h1 = u(rng), h2 = u(rng);
        const double r = curve_residual(h1, h2, j);
        CHECK(curve_residual(h2, h1, j) == r);
        CHECK(curve_residual(-h1, -h2, j) == r);
    }
}

TEST_CASE("solve_h2 special cases") {
    SECTION("XY hyperbola h1 h2 = jx jy") {
        auto h2 = solve_h2(2.0, kXY, Branch::right);
        REQUIRE(h2);
        CHECK_THAT(*h2, WithinAbs(0.25, 1e-13));
    }
    SECTION("single-field crossing for 0 < jz < jy") {
        // h1 = sqrt((jx^2 - jz^2)(jy^2 - jz^2))/jz with h2 = 0
        const double h1 = std::sqrt((1 - 0.0625) * (0.25 - 0.0625)) / 0.25;
        CHECK_THAT(h1, WithinAbs(1.6770510, 1e-7));
        CHECK_THAT(std::hypot(h1, 1.5) - std::hypot(h1, 0.5), WithinAbs(0.5, 1e-15));
        auto h2 = solve_h2(h1, kA, Branch::right);
        REQUIRE(h2);
        CHECK_THAT(*h2, WithinAbs(0.0, 1e-12));
    }
    SECTION("asymptote: h2 -> -jz monotonically as h1 grows") {
        double prev = 1e9;
        for (double h1 : {2.0, 4.0, 8.0, 16.0, 64.0}) {
            auto h2 = solve_h2(h1, kA, Branch::right);
            REQUIRE(h2);
            CHECK(*h2 > -kA.jz);
            CHECK(*h2 < prev);
            prev = *h2;
        }
        CHECK_THAT(prev, WithinAbs(-0.25, 1e-2));
    }
    SECTION("no solution below the minimum field for jz > jy") {
        const double hmin = std::sqrt(kB.jz * kB.jz - kB.jy * kB.jy);
        CHECK_FALSE(solve_h2(0.9 * hmin, kB, Branch::right).has_value());
        CHECK_FALSE(solve_h2(0.0, kB, Branch::right).has_value());
    }
    SECTION("two sectors for jz > jy, ordered by h2") {
        auto up = solve_h2(0.70, kB, Branch::right, Sector::upper);
        auto lo = solve_h2(0.70, kB, Branch::right, Sector::lower);
        REQUIRE(up);
        REQUIRE(lo);
        CHECK(*up > *lo);
        CHECK_THAT(curve_residual(0.70, *up, kB), WithinAbs(0.0, 1e-12));
        CHECK_THAT(curve_residual(0.70, *lo, kB), WithinAbs(0.0, 1e-12));
        // both h2 below the sector split -hmin jx/jy on one side only
        const double split = -std::sqrt(kB.jz * kB.jz - kB.jy * kB.jy) * kB.jx / kB.jy;
        CHECK(*up > split);
        CHECK(*lo < split);
    }
    SECTION("left branch mirrors the right branch") {
        auto r = solve_h2(1.3, kA, Branch::right);
        auto l = solve_h2(-1.3, kA, Branch::left);
        REQUIRE(r);
        REQUIRE(l);
        CHECK_THAT(*l, WithinAbs(-*r, 1e-13));
    }
    SECTION("degenerate anisotropy rejected") {
        CHECK_THROWS_AS(solve_h2(1.0, Couplings{1, 1, 0.2}, Branch::right), ModelError);
        CHECK_THROWS_AS(solve_h2(1.0, Couplings{1, -1, 0.2}, Branch::right), ModelError);
    }
    SECTION("frame preconditions") {
        CHECK_THROWS_AS(solve_h2(1.0, Couplings{0.5, 1.0, 0.0}, Branch::right), ModelError);
        CHECK_THROWS_AS(solve_h2(1.0, Couplings{-1.0, 0.5, 0.0}, Branch::right), ModelError);
    }
    SECTION("negative jy handled through the internal frame flip") {
        // pi rotation about x at one site: (jy, jz, h2) -> (-jy, -jz, -h2)
        auto ref = solve_h2(1.3, kA, Branch::right);
        auto flip = solve_h2(1.3, Couplings{1.0, -0.5, -0.25}, Branch::right);
        REQUIRE(ref);
        REQUIRE(flip);
        CHECK_THAT(*flip, WithinAbs(-*ref, 1e-13));
    }
}

TEST_CASE("vertices of the factorizing curves") {
    SECTION("jz < jy: uniform fields") {
        auto v = vertex(kA);
        CHECK_THAT(v.h1, WithinAbs(0.4330127, 1e-7));
        CHECK_THAT(v.h2, WithinAbs(v.h1, 1e-15));
        CHECK_THAT(v.eps, WithinAbs(-1.25, 1e-15));
        // cross-check against the sqrt energy form
        CHECK_THAT(-std::sqrt(2 * 0.1875 + 1 + 0.25 - 0.0625), WithinAbs(v.eps, 1e-12));
        CHECK_THAT(curve_residual(v.h1, v.h2, kA), WithinAbs(0.0, 1e-14));
    }
    SECTION("jz > jy: opposite fields") {
        auto v = vertex(kB);
        CHECK_THAT(v.h1, WithinAbs(0.6614378, 1e-7));
        CHECK_THAT(v.h2, WithinAbs(-v.h1, 1e-15));
        CHECK_THAT(v.eps, WithinAbs(-1.25, 1e-15));
        // oracle: the 4-dim pair crossing sits at exactly this field
        auto H = build_pair_hamiltonian(0.5, 0.5, v.h1, v.h2, kB);
        auto sp = parity_block_spectrum(H, 1);
        CHECK_THAT(sp.gap(), WithinAbs(0.0, 1e-13));
        CHECK_THAT(sp.e_min(), WithinAbs(0.5 * v.eps, 1e-13));
    }
    SECTION("jz = jy: origin") {
        auto v = vertex(kC);
        CHECK(v.h1 == 0.0);
        CHECK(v.h2 == 0.0);
        CHECK(v.eps == -1.0);
        auto [t1, t2] = factorized_angles(0.0, 0.0, kC);
        CHECK_THAT(t1, WithinAbs(M_PI / 2, 1e-12));
        CHECK_THAT(t2, WithinAbs(M_PI / 2, 1e-12));
    }
}

TEST_CASE("factorized angles") {
    SECTION("XY point (1, 0.5)") {
        auto [t1, t2] = factorized_angles(1.0, 0.5, kXY);
        CHECK_THAT(std::cos(t1) * std::cos(t1), WithinAbs(0.625, 1e-12));
        CHECK_THAT(std::cos(t2) * std::cos(t2), WithinAbs(0.4, 1e-12));
        CHECK_THAT(std::cos(t1) * std::cos(t2), WithinAbs(0.5, 1e-12));  // pair coupling equation at jz = 0
    }
    SECTION("uniform vertex has cos^2 theta = (jy - jz)/(jx - jz)") {
        auto v = vertex(kA);
        auto [t1, t2] = factorized_angles(v.h1, v.h2, kA);
        CHECK_THAT(t1, WithinAbs(t2, 1e-12));
        CHECK_THAT(std::cos(t1) * std::cos(t1), WithinAbs(1.0 / 3.0, 1e-12));
    }
    SECTION("off-curve rejected") {
        CHECK_THROWS_AS(factorized_angles(1.0, 0.9, kXY), ModelError);
    }
    SECTION("angles on (0, pi) across branches: theta(-h1) = pi - theta(h1)") {
        std::mt19937 rng(7);
        for (const auto& j : {kXY, kA, kC, kB}) {
            for (double h1 : sample_h1(j, 12, rng)) {
                auto p = solve_point(h1, j, Branch::right);
                auto m = solve_point(-h1, j, Branch::left);
                REQUIRE(p);
                REQUIRE(m);
                CHECK_THAT(m->theta1, WithinAbs(M_PI - p->theta1, 1e-9));
                CHECK_THAT(m->theta2, WithinAbs(M_PI - p->theta2, 1e-9));
            }
        }
    }
}

TEST_CASE("pair energy closed forms") {
    SECTION("XY point: eps = -sqrt(2.5) by both applicable forms") {
        auto e = pair_energy(1.0, 0.5, kXY);
        CHECK_THAT(e.eps, WithinAbs(-1.5811388, 1e-7));
        CHECK_THAT(e.form_halfsum, WithinAbs(-std::sqrt(2.5), 1e-13));
        CHECK_FALSE(e.form_product.has_value());
    }
    SECTION("vertex of jz=0.25 by the product form") {
        auto v = vertex(kA);
        auto e = pair_energy(v.h1, v.h2, kA);
        REQUIRE(e.form_product);
        CHECK_THAT(*e.form_product, WithinAbs(-(0.5 - 0.1875) / 0.25, 1e-12));
        CHECK_THAT(e.eps, WithinAbs(-1.25, 1e-12));
    }
    SECTION("origin of jz=jy: eps = -jx") {
        auto e = pair_energy(0.0, 0.0, kC);
        CHECK_THAT(e.eps, WithinAbs(-1.0, 1e-14));
    }
    SECTION("off-curve rejected") {
        CHECK_THROWS_AS(pair_energy(0.0, 0.0, kA), ModelError);
    }
}

TEST_CASE("on-curve consistency properties") {
    std::mt19937 rng(123);
    for (const auto& j : {kXY, kA, kC, kB}) {
        for (double h1 : sample_h1(j, 25, rng)) {
            auto pt = solve_point(h1, j, Branch::right);
            REQUIRE(pt);
            auto e = pair_energy(pt->h1, pt->h2, j);
            CHECK_THAT(e.resid_halfsum_sqrt, WithinAbs(0.0, 1e-10));
            if (e.resid_sqrt_product) CHECK_THAT(*e.resid_sqrt_product, WithinAbs(0.0, 1e-10));
            CHECK(e.eps + std::abs(j.jz) <= 1e-10);
            // the assembled point carries vanishing pair-equation residuals
            CHECK(pt->residuals.at("pair_coupling") == 0.0);
            CHECK_THAT(pt->residuals.at("pair_field_1"), WithinAbs(0.0, 1e-9));
            CHECK_THAT(pt->residuals.at("pair_field_2"), WithinAbs(0.0, 1e-9));
            CHECK(pt->branch == Branch::right);
        }
    }
}

TEST_CASE("XXZ limit hyperbolas") {
    const Couplings j{1.0, 1.0 - 1e-6, 0.3};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.2, 2.5);
    for (int t = 0; t < 20; ++t) {
        const double h1 = u(rng);
        auto h2 = solve_h2(h1, j, Branch::right);
        REQUIRE(h2);
        CHECK_THAT((h1 + j.jz) * (*h2 + j.jz), WithinAbs(j.jx * j.jx, 1e-4));
        auto h2l = solve_h2(-h1, j, Branch::left);
        REQUIRE(h2l);
        CHECK_THAT((-h1 - j.jz) * (*h2l - j.jz), WithinAbs(j.jx * j.jx, 1e-4));
    }
}

TEST_CASE("separability residuals") {
    auto pair = build_chain(2, false, kA);
    SECTION("aligned state: all field-independent and theta equations vanish") {
        auto r = separability_residuals(pair, {0.0, 0.0}, {0.0, 0.0}, explicit_fields({0.7, -1.2}));
        CHECK(r.edge[0].coupling_phase == 0.0);
        CHECK(r.site[0].field == 0.0);
        CHECK(r.site[1].field == 0.0);
        CHECK(r.site[0].phase == 0.0);
    }
    SECTION("verified factorization point: everything vanishes") {
        auto pt = solve_point(1.1, kA, Branch::right);
        REQUIRE(pt);
        auto r = separability_residuals(pair, {pt->theta1, pt->theta2}, {0.0, 0.0},
                                        explicit_fields({pt->h1, pt->h2}));
        CHECK(r.max_abs() < 1e-12);
    }
    SECTION("mismatched angles leave the jz - jy imbalance") {
        auto r = separability_residuals(pair, {M_PI / 2, M_PI / 2}, {0.0, 0.0}, explicit_fields({0.0, 0.0}));
        CHECK_THAT(r.edge[0].coupling, WithinAbs(kA.jz - kA.jy, 1e-15));
    }
    SECTION("n=8 chain with alternating on-curve fields") {
        auto chain = build_chain(8, true, kA);
        auto pt = solve_point(0.8, kA, Branch::right);
        REQUIRE(pt);
        auto theta = alternating_angles(chain, pt->theta1, pt->theta2);
        auto r = separability_residuals(chain, theta, std::vector<double>(8, 0.0),
                                        alternating_fields(chain, pt->h1, pt->h2));
        CHECK(r.max_abs() < 1e-12);
    }
}

TEST_CASE("graph factorization") {
    SECTION("pair reduction reproduces the pair quantities") {
        auto pair = build_chain(2, false, kA);
        auto pt = solve_point(0.9, kA, Branch::right);
        REQUIRE(pt);
        auto g = graph_factorization(pair, {pt->theta1, pt->theta2});
        CHECK_THAT(g.site_fields[0], WithinAbs(pt->h1, 1e-10));
        CHECK_THAT(g.site_fields[1], WithinAbs(pt->h2, 1e-10));
        CHECK_THAT(g.total_energy, WithinAbs(0.5 * pt->eps, 1e-10));
        CHECK_THAT(g.edges[0].jy_required, WithinAbs(kA.jy, 1e-10));
        CHECK(g.max_curve_residual < 1e-10);
        CHECK(g.edges[0].gs_ok);
    }
    SECTION("cyclic n=8: doubled fields and E = 8 s eps") {
        auto chain = build_chain(8, true, kA);
        auto pt = solve_point(1.2, kA, Branch::right);
        REQUIRE(pt);
        auto g = graph_factorization(chain, alternating_angles(chain, pt->theta1, pt->theta2));
        for (int i = 0; i < 8; ++i)
            CHECK_THAT(g.site_fields[i], WithinAbs(2.0 * (i % 2 == 0 ? pt->h1 : pt->h2), 1e-10));
        CHECK_THAT(g.total_energy, WithinAbs(8.0 * 0.5 * pt->eps, 1e-10));
        CHECK(g.max_curve_residual < 1e-10);
    }
    SECTION("open n=4: border-corrected fields and E = 3 s eps") {
        auto chain = build_chain(4, false, kA);
        auto pt = solve_point(1.2, kA, Branch::right);
        REQUIRE(pt);
        auto g = graph_factorization(chain, alternating_angles(chain, pt->theta1, pt->theta2));
        CHECK_THAT(g.site_fields[0], WithinAbs(pt->h1, 1e-10));
        CHECK_THAT(g.site_fields[1], WithinAbs(2 * pt->h2, 1e-10));
        CHECK_THAT(g.site_fields[2], WithinAbs(2 * pt->h1, 1e-10));
        CHECK_THAT(g.site_fields[3], WithinAbs(pt->h2, 1e-10));
        CHECK_THAT(g.total_energy, WithinAbs(3.0 * 0.5 * pt->eps, 1e-10));
    }
    SECTION("bipartite lattice reproduces alternating_fields") {
        auto grid = build_square_lattice(3, 4, kA);
        auto pt = solve_point(0.75, kA, Branch::right);
        REQUIRE(pt);
        auto g = graph_factorization(grid, alternating_angles(grid, pt->theta1, pt->theta2));
        auto f = alternating_fields(grid, pt->h1, pt->h2);
        for (int i = 0; i < grid.n_sites; ++i) CHECK_THAT(g.site_fields[i], WithinAbs(f.values[i], 1e-10));
    }
    SECTION("vanishing sin(theta) rejected") {
        auto pair = build_chain(2, false, kA);
        CHECK_THROWS_AS(graph_factorization(pair, {0.0, 1.0}), ModelError);
    }
}

TEST_CASE("energy splitting estimate") {
    auto v = vertex(kA);
    auto pt = factorization_point(v.h1, v.h2, kA);
    const std::vector<double> theta{pt.theta1, pt.theta2};

    SECTION("zero deviation gives zero") {
        CHECK(energy_splitting_estimate(theta, 0.5, {0.0, 0.0}) == 0.0);
    }
    SECTION("matches the exact pair gap to first order") {
        auto pair = build_chain(2, false, kA);
        auto exact_gap = [&](double dh) {
            auto H = build_hamiltonian(pair, explicit_fields({v.h1 + dh, v.h2 + dh}), 0.5);
            return parity_block_spectrum(H, 1, {}, false).gap();
        };
        const double e3 = energy_splitting_estimate(theta, 0.5, {1e-3, 1e-3});
        const double e4 = energy_splitting_estimate(theta, 0.5, {1e-4, 1e-4});
        const double r3 = std::abs(e3 - exact_gap(1e-3)) / std::abs(exact_gap(1e-3));
        const double r4 = std::abs(e4 - exact_gap(1e-4)) / std::abs(exact_gap(1e-4));
        CHECK(r3 < 1e-3);
        CHECK(r4 < 1e-4 * 1.5);  // first-order estimate: relative error shrinks with dh
    }
    SECTION("splitting shrinks with system size at fixed angles") {
        const std::vector<double> t4(4, pt.theta1), t8(8, pt.theta1);
        const std::vector<double> d4(4, 1e-4), d8(8, 1e-4);
        CHECK(std::abs(energy_splitting_estimate(t8, 0.5, d8)) <
              std::abs(energy_splitting_estimate(t4, 0.5, d4)));
    }
    SECTION("theta = pi/2 is singular") {
        CHECK_THROWS_AS(energy_splitting_estimate({M_PI / 2, 1.0}, 0.5, {1e-3, 1e-3}), NumericsError);
    }
}

TEST_CASE("canonicalize maps any anisotropic couplings into the derivation frame") {
    auto c1 = canonicalize({0.4, -1.0, 0.2});
    CHECK(c1.swapped_xy);
    CHECK(c1.j.jx == 1.0);
    CHECK(c1.j.jy == 0.4);
    auto c2 = canonicalize({-1.0, 0.3, 0.2});
    CHECK(c2.rotated_jx);
    CHECK(c2.j.jx == 1.0);
    CHECK(c2.j.jy == 0.3);  // transverse couplings negated, then the jy flip restores the sign
    CHECK(c2.flipped_jy);
    CHECK(c2.j.jz == -0.2);
    auto c3 = canonicalize({1.0, -0.5, 0.25});
    CHECK(c3.flipped_jy);
    CHECK(c3.j.jy == 0.5);
    CHECK(c3.j.jz == -0.25);
    CHECK(c3.map_h2_from_canonical(0.7) == -0.7);
}
