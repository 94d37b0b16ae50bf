#include <catch2/catch_amalgamated.hpp>

#include "xyzsep/lattice.hpp"
#include "xyzsep/model_io.hpp"

using namespace xyzsep;

namespace {
const Couplings kJ{1.0, 0.5, 0.25};
}

TEST_CASE("chain builders") {
    SECTION("pair") {
        auto lat = build_chain(2, false, kJ);
        REQUIRE(lat.n_sites == 2);
        REQUIRE(lat.edges.size() == 1);
        CHECK(lat.edges[0].i == 0);
        CHECK(lat.edges[0].j == 1);
    }
    SECTION("open n=4 path graph") {
        auto lat = build_chain(4, false, kJ);
        REQUIRE(lat.edges.size() == 3);
        auto r = coordination_numbers(lat);
        CHECK(r == std::vector<double>{1, 2, 2, 1});
    }
    SECTION("cyclic n=8") {
        auto lat = build_chain(8, true, kJ);
        auto r = coordination_numbers(lat);
        for (double ri : r) CHECK(ri == 2.0);
        CHECK(link_count(lat) == 8.0);
    }
    SECTION("cyclic with odd n rejected") {
        CHECK_THROWS_AS(build_chain(5, true, kJ), ModelError);
    }
}

TEST_CASE("square and cubic lattices") {
    SECTION("3x3 coordination and links") {
        auto lat = build_square_lattice(3, 3, kJ);
        auto r = coordination_numbers(lat);
        // corners 2, edges 3, center 4
        CHECK(r[0] == 2);
        CHECK(r[1] == 3);
        CHECK(r[4] == 4);
        CHECK(link_count(lat) == 12.0);  // N = 2n - m - l = 18 - 3 - 3
    }
    SECTION("2x2 is the 4-cycle") {
        auto lat = build_square_lattice(2, 2, kJ);
        for (double ri : coordination_numbers(lat)) CHECK(ri == 2.0);
        CHECK(link_count(lat) == 4.0);
    }
    SECTION("2x3 link count") {
        auto lat = build_square_lattice(2, 3, kJ);
        CHECK(link_count(lat) == 2.0 * 6 - 2 - 3);
        CHECK(lat.edges.size() == 7);  // edge count agrees when all r = 1
    }
    SECTION("open chains obey N = n - 1") {
        CHECK(link_count(build_chain(5, false, kJ)) == 4.0);
    }
    SECTION("3x3x3 cubic obeys N = 3n - ml - mk - lk") {
        auto lat = build_cubic_lattice(3, 3, 3, kJ);
        CHECK(link_count(lat) == 3.0 * 27 - 9 - 9 - 9);
        CHECK(lat.edges.size() == 54);
    }
    SECTION("ladder with direction-dependent ratios (rows alpha/gamma, rungs beta)") {
        const double alpha = 0.8, beta = 1.3, gamma = 0.6;
        auto lat = build_square_lattice(2, 5, kJ, 0.5, {alpha, gamma}, beta);
        auto r = coordination_numbers(lat);
        CHECK_THAT(r[2], Catch::Matchers::WithinAbs(2 * alpha + beta, 1e-14));  // lower-row bulk
        CHECK_THAT(r[7], Catch::Matchers::WithinAbs(2 * gamma + beta, 1e-14));  // upper-row bulk
    }
}

TEST_CASE("alternating fields") {
    SECTION("open n=4: border corrections (h1, 2h2, 2h1, h2)") {
        auto lat = build_chain(4, false, kJ);
        auto f = alternating_fields(lat, 0.7, -0.2);
        CHECK(f.values == std::vector<double>{0.7, -0.4, 1.4, -0.2});
    }
    SECTION("cyclic n=8: (2h1, 2h2, ...)") {
        auto lat = build_chain(8, true, kJ);
        auto f = alternating_fields(lat, 0.3, 0.9);
        for (int i = 0; i < 8; ++i) CHECK(f.values[i] == (i % 2 == 0 ? 0.6 : 1.8));
    }
    SECTION("single pair: (h1, h2)") {
        auto lat = build_chain(2, false, kJ);
        auto f = alternating_fields(lat, 1.25, -0.5);
        CHECK(f.values == std::vector<double>{1.25, -0.5});
    }
    SECTION("translation by two sites leaves a cyclic chain invariant") {
        auto lat = build_chain(8, true, kJ);
        auto f = alternating_fields(lat, 0.4, 1.1);
        for (int i = 0; i < 8; ++i) CHECK(f.values[i] == f.values[(i + 2) % 8]);
    }
    SECTION("grid coloring matches the (i + j) parity rule") {
        auto lat = build_square_lattice(3, 4, kJ);
        auto color = bipartite_coloring(lat);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 4; ++b) CHECK(color[a * 4 + b] == (a + b) % 2);
    }
    SECTION("non-bipartite graph rejected") {
        SpinLattice tri;
        tri.n_sites = 3;
        tri.spin = {0.5, 0.5, 0.5};
        tri.base = kJ;
        tri.edges = {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
        CHECK_THROWS_AS(alternating_fields(tri, 1, 2), ModelError);
    }
}

TEST_CASE("lattice validation") {
    SpinLattice lat = build_chain(3, false, kJ);
    SECTION("self edge") {
        lat.edges.push_back({1, 1, 1.0});
        CHECK_THROWS_AS(validate_lattice(lat), ModelError);
    }
    SECTION("duplicate edge") {
        lat.edges.push_back({1, 0, 1.0});
        CHECK_THROWS_AS(validate_lattice(lat), ModelError);
    }
    SECTION("negative strength") {
        lat.edges[0].r = -0.5;
        CHECK_THROWS_AS(validate_lattice(lat), ModelError);
    }
    SECTION("mixed spins only for pairs") {
        lat.spin = {0.5, 1.0, 0.5};
        CHECK_THROWS_AS(validate_lattice(lat), ModelError);
        SpinLattice pair = build_chain(2, false, kJ);
        pair.spin = {0.5, 1.0};
        CHECK_NOTHROW(validate_lattice(pair));
    }
}

TEST_CASE("model JSON round-trip") {
    auto lat = build_chain(8, true, kJ);
    auto fields = alternating_fields(lat, 0.9, 0.35);

    SECTION("structural equality through serialize/parse") {
        auto j = model_to_json(lat, fields);
        auto m2 = parse_model(j);
        CHECK(m2.lattice.n_sites == lat.n_sites);
        CHECK(m2.lattice.spin == lat.spin);
        CHECK(m2.lattice.cyclic == lat.cyclic);
        REQUIRE(m2.lattice.edges.size() == lat.edges.size());
        CHECK(m2.lattice.base.jx == lat.base.jx);
        REQUIRE(m2.fields.has_value());
        CHECK(m2.fields->pattern == FieldAssignment::Pattern::Alternating);
        CHECK(m2.fields->values == fields.values);
        // byte-stable second pass
        CHECK(model_to_json(m2.lattice, m2.fields).dump() == j.dump());
    }
    SECTION("explicit fields variant") {
        auto j = model_to_json(lat, explicit_fields({1, 2, 3, 4, 5, 6, 7, 8}));
        auto m2 = parse_model(j);
        CHECK(m2.fields->pattern == FieldAssignment::Pattern::Explicit);
        CHECK(m2.fields->values == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    }
    SECTION("unknown keys rejected") {
        auto j = model_to_json(lat, std::nullopt);
        j["typo"] = 1;
        CHECK_THROWS_AS(parse_model(j), ModelError);
    }
    SECTION("1-indexed sites in files") {
        auto j = model_to_json(build_chain(2, false, kJ), std::nullopt);
        CHECK(j["edges"][0][0] == 1);
        CHECK(j["edges"][0][1] == 2);
    }
    SECTION("field length mismatch rejected") {
        auto j = model_to_json(lat, std::nullopt);
        j["fields"] = {1.0, 2.0};
        CHECK_THROWS_AS(parse_model(j), ModelError);
    }
}
