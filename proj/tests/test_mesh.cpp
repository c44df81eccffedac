#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wfem/mesh.hpp"
#include "wfem/mesh_io.hpp"

using namespace wfem;

TEST_CASE("coarsest disk mesh is valid and nontrivial") {
    Mesh m = generate_disk_mesh(1.0, 0.5);
    REQUIRE(m.triangles.size() >= 4);
    REQUIRE_NOTHROW(validate_mesh(m));
    int rings = static_cast<int>(std::ceil(1.0 / 0.5));
    REQUIRE(m.triangles.size() == static_cast<size_t>(6 * rings * rings));
    REQUIRE(m.vertices.size() == static_cast<size_t>(1 + 3 * rings * (rings + 1)));
}

TEST_CASE("disk mesh area approaches pi with the expected polygon defect") {
    Mesh m = generate_disk_mesh(1.0, 0.1);
    REQUIRE_THAT(polygon_area(m), Catch::Matchers::WithinRel(M_PI, 0.01));
}

TEST_CASE("boundary vertices sit on the circle to 1e-12") {
    Mesh m = generate_disk_mesh(1.0, 0.3);
    for (auto& be : m.boundary_edges) {
        REQUIRE_THAT(norm(m.vertices[be.a]), Catch::Matchers::WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(norm(m.vertices[be.b]), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("halving h_target halves h_max within [1.8, 2.2]") {
    double h = 0.5;
    double prev = generate_disk_mesh(1.0, h).h_max;
    for (int step = 0; step < 3; ++step) {
        h /= 2.0;
        double cur = generate_disk_mesh(1.0, h).h_max;
        double ratio = prev / cur;
        REQUIRE(ratio >= 1.8);
        REQUIRE(ratio <= 2.2);
        prev = cur;
    }
}

TEST_CASE("generated h_max never exceeds twice the target") {
    for (double h : {0.5, 0.25, 0.1}) {
        REQUIRE(generate_disk_mesh(1.0, h).h_max <= 2.0 * h);
        REQUIRE(generate_square_mesh(h).h_max <= 2.0 * h);
    }
}

TEST_CASE("red refinement: 4T triangles and V+E vertices") {
    Mesh m = generate_disk_mesh(1.0, 0.4);
    Mesh r = refine(m);
    REQUIRE(r.triangles.size() == 4 * m.triangles.size());
    size_t edges = (3 * m.triangles.size() + m.boundary_edges.size()) / 2;
    REQUIRE(r.vertices.size() == m.vertices.size() + edges);
    REQUIRE_NOTHROW(validate_mesh(r));
}

TEST_CASE("disk area defect shrinks by about 4 per refinement") {
    Mesh m = generate_disk_mesh(1.0, 0.25);
    double d0 = M_PI - polygon_area(m);
    Mesh r1 = refine(m);
    double d1 = M_PI - polygon_area(r1);
    double d2 = M_PI - polygon_area(refine(r1));
    REQUIRE(d0 / d1 > 3.0);
    REQUIRE(d0 / d1 < 5.0);
    REQUIRE(d1 / d2 > 3.0);
    REQUIRE(d1 / d2 < 5.0);
}

TEST_CASE("exact distance values on the reference domains") {
    Mesh disk = generate_disk_mesh(1.0, 0.5);
    REQUIRE(distance_to_boundary(disk, {0.0, 0.0}) == 1.0);
    REQUIRE_THAT(distance_to_boundary(disk, {0.5, 0.0}),
                 Catch::Matchers::WithinAbs(0.5, 1e-15));
    Mesh sq = generate_square_mesh(0.5);
    REQUIRE_THAT(distance_to_boundary(sq, {0.25, 0.5}),
                 Catch::Matchers::WithinAbs(0.25, 1e-15));
    REQUIRE_THROWS_AS(distance_to_boundary(disk, {2.0, 0.0}), std::domain_error);
}

TEST_CASE("distance is 1-Lipschitz on sampled pairs") {
    Mesh disk = generate_disk_mesh(1.0, 0.5);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int i = 0; i < 200; ++i) {
        Vec2 p{u(rng), u(rng)}, q{u(rng), u(rng)};
        double dd = std::abs(distance_to_boundary(disk, p) - distance_to_boundary(disk, q));
        REQUIRE(dd <= norm(p - q) + 1e-14);
    }
}

TEST_CASE("angular split labels both parts, lengths close to the arc split") {
    BoundaryPartitionRule rule{BoundaryPartitionRule::Kind::AngularSplit, M_PI};
    Mesh m = generate_disk_mesh(1.0, 0.1, rule);
    double lf = boundary_length(m, EdgeLabel::Flux);
    double ld = boundary_length(m, EdgeLabel::Dirichlet);
    REQUIRE(lf > 0.0);
    REQUIRE(ld > 0.0);
    REQUIRE_THAT(lf, Catch::Matchers::WithinRel(M_PI, 0.01));
    REQUIRE_THAT(ld, Catch::Matchers::WithinRel(M_PI, 0.01));
}

TEST_CASE("axis split on the square marks exactly the top side") {
    BoundaryPartitionRule rule{BoundaryPartitionRule::Kind::AxisSplit, 1.0};
    Mesh m = generate_square_mesh(0.25, rule);
    REQUIRE_THAT(boundary_length(m, EdgeLabel::Flux),
                 Catch::Matchers::WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(boundary_length(m, EdgeLabel::Dirichlet),
                 Catch::Matchers::WithinAbs(3.0, 1e-14));
}

TEST_CASE("refinement changes the partition measure only at O(h^2)") {
    BoundaryPartitionRule rule{BoundaryPartitionRule::Kind::AngularSplit, M_PI / 2.0};
    Mesh m = generate_disk_mesh(1.0, 0.2, rule);
    Mesh r = refine(m);
    double before = boundary_length(m, EdgeLabel::Flux);
    double after = boundary_length(r, EdgeLabel::Flux);
    REQUIRE(std::abs(after - before) <= 2.0 * m.h_max * m.h_max);
    REQUIRE(after > before); // chords move toward the arc
}

TEST_CASE("full-Dirichlet is the default; empty Dirichlet part is rejected") {
    Mesh m = generate_disk_mesh(1.0, 0.5);
    for (auto& be : m.boundary_edges) REQUIRE(be.label == EdgeLabel::Dirichlet);
    BoundaryPartitionRule all_flux{BoundaryPartitionRule::Kind::AngularSplit,
                                   2.0 * M_PI + 1.0};
    REQUIRE_THROWS_AS(generate_disk_mesh(1.0, 0.5, all_flux), std::invalid_argument);
}

TEST_CASE("json round trip preserves the mesh; invalid documents are rejected") {
    BoundaryPartitionRule rule{BoundaryPartitionRule::Kind::AngularSplit, M_PI};
    Mesh m = generate_disk_mesh(1.0, 0.3, rule);
    auto j = mesh_to_json(m);
    Mesh back = mesh_from_json(j);
    REQUIRE(back.vertices.size() == m.vertices.size());
    REQUIRE(back.triangles.size() == m.triangles.size());
    REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
    REQUIRE(back.h_max == m.h_max);

    auto flipped = j;
    flipped["triangles"][0] = {m.triangles[0][1], m.triangles[0][0], m.triangles[0][2]};
    REQUIRE_THROWS_AS(mesh_from_json(flipped), std::invalid_argument);

    auto dropped = j;
    dropped["boundary_edges"].erase(0);
    REQUIRE_THROWS_AS(mesh_from_json(dropped), std::invalid_argument);

    auto wrong_h = j;
    wrong_h["h_max"] = 123.0;
    REQUIRE_THROWS_AS(mesh_from_json(wrong_h), std::invalid_argument);
}

TEST_CASE("argument validation") {
    REQUIRE_THROWS_AS(generate_disk_mesh(1.0, 1.5), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_disk_mesh(-1.0, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_disk_mesh(1.0, 1e-6), std::length_error);
}
