#include <catch2/catch_amalgamated.hpp>
#include <cstring>
#include <random>

#include "mtsa/assembly.hpp"

using namespace mtsa;

TEST_CASE("reference P1 element stiffness on the unit right triangle") {
    std::array<Vec2, 3> p{{{0, 0}, {1, 0}, {0, 1}}};
    P1Element el = p1_element(p);
    REQUIRE_THAT(el.area, Catch::Matchers::WithinRel(0.5, 1e-15));
    // K_ij = area * grad_i . grad_j  ->  1/2 [[2,-1,-1],[-1,1,0],[-1,0,1]]
    const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            REQUIRE_THAT(el.area * el.grad[i].dot(el.grad[j]),
                         Catch::Matchers::WithinAbs(expect[i][j], 1e-14));
}

TEST_CASE("p1_element rejects degenerate and inverted triangles") {
    REQUIRE_THROWS_AS(p1_element({{{0, 0}, {1, 0}, {2, 0}}}), Error);
    REQUIRE_THROWS_AS(p1_element({{{0, 0}, {0, 1}, {1, 0}}}), Error);
}

namespace {

SystemBlocks assemble_square(double kappa, double cv, double q, double t_level = 4.2) {
    Mesh m = generate_rectangle(1.0, 1.0, 0.25);
    std::map<int, Material> mats{{1, Material::constant(kappa, cv)}};
    SourceSpec src;
    src.q_by_region[1] = q;
    Vector t = Vector::Constant(m.nodes.size(), t_level);
    return assemble_blocks(m, mats, src, {}, t);
}

}  // namespace

TEST_CASE("stiffness matrix is symmetric with constants in its kernel") {
    SystemBlocks b = assemble_square(3.0, 1.0, 0.0);
    const Vector ones = Vector::Ones(b.K.rows());
    REQUIRE((b.K * ones).lpNorm<Eigen::Infinity>() < 1e-14);
    SparseMat diff = SparseMat(b.K.transpose()) - b.K;
    REQUIRE((diff.coeffs().size() == 0 || diff.coeffs().cwiseAbs().maxCoeff() == 0.0));
    // SPSD: x^T K x >= 0 for random x.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Vector x(b.K.rows());
        for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
        REQUIRE(x.dot(b.K * x) >= -1e-13);
    }
}

TEST_CASE("mass matrix entries sum to the heat content") {
    const double cv = 1700.0;
    SystemBlocks b = assemble_square(1.0, cv, 0.0);
    const Vector ones = Vector::Ones(b.M.rows());
    REQUIRE_THAT(ones.dot(b.M * ones), Catch::Matchers::WithinRel(cv * 1.0, 1e-12));
}

TEST_CASE("source load sums to Q times the area") {
    SystemBlocks b = assemble_square(1.0, 1.0, 1e5);
    REQUIRE_THAT(b.f.sum(), Catch::Matchers::WithinRel(1e5, 1e-12));
}

TEST_CASE("missing region material is reported by tag") {
    Mesh m = generate_rectangle(1.0, 1.0, 0.5);
    std::map<int, Material> mats;  // nothing assigned
    SystemBlocks out;
    REQUIRE_THROWS_WITH(assemble_volume(m, mats, {}, Vector::Constant(m.nodes.size(), 4.2), out),
                        Catch::Matchers::ContainsSubstring("region tag 1"));
}

TEST_CASE("Robin edge contributes hL/6 [[2,1],[1,2]] and the hTref load") {
    Mesh m = generate_rectangle(1.0, 1.0, 1.0);
    std::vector<BoundaryCondition> bcs{
        {BoundaryCondition::Kind::robin, m.tag("exterior"), 0.0, 12.0, 5.0}};
    SystemBlocks out;
    assemble_robin(m, bcs, out);
    // Whole boundary, length 4: row sums of R total h*perimeter, load h*Tref*perimeter.
    const Vector ones = Vector::Ones(out.R.rows());
    REQUIRE_THAT(ones.dot(out.R * ones), Catch::Matchers::WithinRel(12.0 * 4.0, 1e-13));
    REQUIRE_THAT(out.r.sum(), Catch::Matchers::WithinRel(12.0 * 5.0 * 4.0, 1e-13));
    // Single-edge structure.
    Mesh one_edge = generate_rectangle(1.0, 1.0, 1.0);
    one_edge.boundary_edges = {{{0, 1}, 9}};
    one_edge.tags["left"] = 9;
    SystemBlocks blk;
    assemble_robin(one_edge, {{BoundaryCondition::Kind::robin, 9, 0.0, 6.0, 0.0}}, blk);
    REQUIRE_THAT(blk.R.coeff(0, 0), Catch::Matchers::WithinRel(2.0, 1e-14));
    REQUIRE_THAT(blk.R.coeff(0, 1), Catch::Matchers::WithinRel(1.0, 1e-14));
    REQUIRE_THAT(blk.R.coeff(1, 1), Catch::Matchers::WithinRel(2.0, 1e-14));
}

TEST_CASE("one BC kind per curve tag") {
    std::vector<BoundaryCondition> bcs{
        {BoundaryCondition::Kind::dirichlet, 5, 4.2, 0.0, 0.0},
        {BoundaryCondition::Kind::robin, 5, 0.0, 1.0, 4.2}};
    REQUIRE_THROWS_AS(check_bcs(bcs), Error);
}

TEST_CASE("SparseBuilder is order independent and bit deterministic") {
    auto build = [](const std::vector<std::array<double, 3>>& entries) {
        SparseBuilder b(4, 4);
        for (const auto& e : entries)
            b.add(static_cast<int>(e[0]), static_cast<int>(e[1]), e[2]);
        return b.finalize();
    };
    std::vector<std::array<double, 3>> ent{
        {0, 0, 0.1}, {1, 2, 1e-17}, {1, 2, 1.0}, {1, 2, -1e-17}, {3, 3, 2.0}, {0, 0, 0.3}};
    SparseMat a = build(ent);
    std::vector<std::array<double, 3>> shuffled{
        {1, 2, 1.0}, {3, 3, 2.0}, {0, 0, 0.3}, {1, 2, -1e-17}, {0, 0, 0.1}, {1, 2, 1e-17}};
    SparseMat b2 = build(shuffled);
    REQUIRE(a.nonZeros() == b2.nonZeros());
    for (int i = 0; i < a.nonZeros(); ++i) {
        REQUIRE(std::memcmp(&a.valuePtr()[i], &b2.valuePtr()[i], sizeof(double)) == 0);
    }
}

TEST_CASE("Dirichlet elimination reproduces the exact linear solution") {
    // Laplace on the unit square with T = x imposed on the whole boundary.
    Mesh m = generate_rectangle(1.0, 1.0, 0.25);
    std::map<int, Material> mats{{1, Material::constant(2.0, 1.0)}};
    Vector t = Vector::Constant(m.nodes.size(), 4.2);
    SystemBlocks blk = assemble_blocks(m, mats, {}, {}, t);

    DirichletValues d;
    for (const auto& e : m.boundary_edges) {
        d.set(e.n[0], m.nodes[e.n[0]].x);
        d.set(e.n[1], m.nodes[e.n[1]].x);
    }
    Vector b = Vector::Zero(m.nodes.size());
    ReducedSystem red = apply_dirichlet(blk.K, b, d);
    Eigen::SimplicialLDLT<SparseMat> chol(red.A);
    Vector x = red.reconstruct(chol.solve(red.b));
    for (const auto& n : m.nodes)
        REQUIRE_THAT(x[n.id], Catch::Matchers::WithinAbs(n.x, 1e-12));
}

TEST_CASE("conflicting Dirichlet values are rejected") {
    DirichletValues d;
    d.set(3, 1.0);
    d.set(3, 1.0);  // same value is fine
    REQUIRE_THROWS_AS(d.set(3, 2.0), Error);
}
