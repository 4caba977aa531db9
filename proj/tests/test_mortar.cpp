#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "mtsa/mortar.hpp"

using namespace mtsa;

namespace {

/// Straight trace along +y through the given arc-length breakpoints.
TraceMesh trace_from_breakpoints(std::vector<double> s, bool reversed = false, double x0 = 0.0) {
    TraceMesh tr;
    tr.side = TraceSide::virtual_interface;
    if (reversed) std::reverse(s.begin(), s.end());
    const double s0 = s.front();
    for (double v : s) {
        tr.node_ids.push_back(-1);
        tr.xy.push_back({x0, v});
        tr.s.push_back(std::abs(v - s0));
    }
    return tr;
}

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

double p1_basis(const std::vector<double>& s, int i, double v) {
    const int n = static_cast<int>(s.size());
    if (i > 0 && v >= s[i - 1] && v <= s[i]) return (v - s[i - 1]) / (s[i] - s[i - 1]);
    if (i + 1 < n && v >= s[i] && v <= s[i + 1]) return (s[i + 1] - v) / (s[i + 1] - s[i]);
    return 0.0;
}

/// Brute-force coupling matrix by 64-point Gauss over each carrier segment.
Eigen::MatrixXd oracle_coupling(const TraceMesh& lam, const TraceMesh& side, bool side_reversed) {
    std::vector<double> gx, gw;
    gauss_legendre(64, gx, gw);
    const int nl = static_cast<int>(lam.size());
    const int ns = static_cast<int>(side.size());
    const double len = lam.length();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nl, ns);
    // Integrate per merged segment so the integrand is smooth.
    std::vector<double> cuts = lam.s;
    for (double v : side.s) cuts.push_back(side_reversed ? len - v : v);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               cuts.end());
    for (std::size_t e = 0; e + 1 < cuts.size(); ++e) {
        const double a = cuts[e], b = cuts[e + 1];
        for (int g = 0; g < 64; ++g) {
            const double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[g];
            const double w = 0.5 * (b - a) * gw[g];
            const double sb = side_reversed ? len - s : s;
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < ns; ++j)
                    d(i, j) += w * p1_basis(lam.s, i, s) * p1_basis(side.s, j, sb);
        }
    }
    return d;
}

std::vector<double> random_partition(std::mt19937& rng, double length, int min_seg, int max_seg) {
    std::uniform_int_distribution<int> nd(min_seg, max_seg);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    const int n = nd(rng);
    std::vector<double> cuts{0.0};
    double acc = 0.0;
    std::vector<double> parts(n);
    for (auto& p : parts) acc += (p = u(rng));
    double run = 0.0;
    for (int i = 0; i < n; ++i) {
        run += parts[i] / acc * length;
        cuts.push_back(i == n - 1 ? length : run);
    }
    return cuts;
}

}  // namespace

TEST_CASE("common refinement merges both breakpoint sets") {
    TraceMesh a = trace_from_breakpoints({0.0, 0.5, 1.0});
    TraceMesh b = trace_from_breakpoints({0.0, 0.25, 1.0});
    CommonRefinement cr = common_refinement(a, b);
    REQUIRE_FALSE(cr.b_reversed);
    REQUIRE(cr.s == std::vector<double>{0.0, 0.25, 0.5, 1.0});
    REQUIRE(cr.parent_a == std::vector<int>{0, 0, 1});
    REQUIRE(cr.parent_b == std::vector<int>{0, 1, 1});
}

TEST_CASE("common refinement detects reversed parametrization") {
    TraceMesh a = trace_from_breakpoints({0.0, 0.5, 1.0});
    TraceMesh b = trace_from_breakpoints({0.0, 0.75, 1.0}, true);
    CommonRefinement cr = common_refinement(a, b);
    REQUIRE(cr.b_reversed);
    REQUIRE_THAT(cr.to_b(0.0), Catch::Matchers::WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(cr.to_b(1.0), Catch::Matchers::WithinAbs(0.0, 1e-15));
    // b's breakpoint at arc length 0.25 maps to 0.75 in a's parametrization.
    REQUIRE(cr.s == std::vector<double>{0.0, 0.5, 0.75, 1.0});
}

TEST_CASE("length mismatch and endpoint mismatch are rejected") {
    TraceMesh a = trace_from_breakpoints({0.0, 1.0});
    TraceMesh b = trace_from_breakpoints({0.0, 1.5});
    REQUIRE_THROWS_WITH(common_refinement(a, b),
                        Catch::Matchers::ContainsSubstring("lengths differ"));
    // Same length but shifted along the chord.
    TraceMesh c = trace_from_breakpoints({0.5, 1.5});
    c.s = {0.0, 1.0};
    REQUIRE_THROWS_WITH(common_refinement(a, c),
                        Catch::Matchers::ContainsSubstring("endpoint mismatch"));
}

TEST_CASE("conforming coupling matrix is the trace mass matrix") {
    TraceMesh a = trace_from_breakpoints({0.0, 0.4, 1.0});
    SparseMat d = coupling_matrix(a, a);
    // P1 mass on segments [0,0.4],[0.4,1.0].
    REQUIRE_THAT(d.coeff(0, 0), Catch::Matchers::WithinRel(0.4 / 3.0, 1e-13));
    REQUIRE_THAT(d.coeff(0, 1), Catch::Matchers::WithinRel(0.4 / 6.0, 1e-13));
    REQUIRE_THAT(d.coeff(1, 1), Catch::Matchers::WithinRel(0.4 / 3.0 + 0.6 / 3.0, 1e-13));
    REQUIRE_THAT(d.coeff(1, 2), Catch::Matchers::WithinRel(0.6 / 6.0, 1e-13));
    REQUIRE(d.coeff(0, 2) == 0.0);
}

TEST_CASE("coupling row sums integrate the carrier basis") {
    // Constant-field compatibility: D_ext * 1 == D_shell * 1 row by row.
    TraceMesh hat = trace_from_breakpoints({0.0, 0.2, 0.5, 0.7, 1.0});
    TraceMesh ext = trace_from_breakpoints({0.0, 0.45, 1.0});
    SparseMat d_ext = coupling_matrix(hat, ext);
    SparseMat d_hat = coupling_matrix(hat, hat);
    const Vector ones_e = Vector::Ones(ext.size());
    const Vector ones_h = Vector::Ones(hat.size());
    REQUIRE(((d_ext * ones_e) - (d_hat * ones_h)).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("coupling matrices match a 64-point Gauss oracle") {
    std::mt19937 rng(2026);
    for (int trial = 0; trial < 20; ++trial) {
        const double length = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
        const bool rev = trial % 2 == 1;
        TraceMesh lam = trace_from_breakpoints(random_partition(rng, length, 2, 8));
        TraceMesh side = trace_from_breakpoints(random_partition(rng, length, 2, 8), rev);
        SparseMat d = coupling_matrix(lam, side);
        Eigen::MatrixXd oracle = oracle_coupling(lam, side, rev);
        for (int i = 0; i < oracle.rows(); ++i)
            for (int j = 0; j < oracle.cols(); ++j) {
                const double got = d.coeff(i, j);
                const double want = oracle(i, j);
                if (std::abs(want) < 1e-16) {
                    REQUIRE(std::abs(got) < 1e-16);
                } else {
                    REQUIRE_THAT(got, Catch::Matchers::WithinRel(want, 1e-13));
                }
            }
    }
}

TEST_CASE("conformal elimination maps hat nodes onto volume nodes") {
    TraceMesh ext = trace_from_breakpoints({0.0, 0.5, 1.0});
    ext.node_ids = {10, 11, 12};
    ext.side = TraceSide::external_1;
    TraceMesh hat = trace_from_breakpoints({0.0, 0.5, 1.0});
    REQUIRE(eliminate_conformal(ext, hat) == std::vector<int>{10, 11, 12});

    TraceMesh ext_rev = trace_from_breakpoints({0.0, 0.5, 1.0}, true);
    ext_rev.node_ids = {20, 21, 22};
    REQUIRE(eliminate_conformal(ext_rev, hat) == std::vector<int>{22, 21, 20});
}

TEST_CASE("conformal elimination rejects non-conforming traces") {
    TraceMesh ext = trace_from_breakpoints({0.0, 0.5, 1.0});
    ext.node_ids = {1, 2, 3};
    TraceMesh hat = trace_from_breakpoints({0.0, 0.25, 0.5, 0.75, 1.0});
    REQUIRE_THROWS_WITH(eliminate_conformal(ext, hat),
                        Catch::Matchers::ContainsSubstring("not conforming"));
    TraceMesh shifted = trace_from_breakpoints({0.0, 0.4, 1.0});
    shifted.node_ids = {1, 2, 3};
    TraceMesh hat3 = trace_from_breakpoints({0.0, 0.5, 1.0});
    REQUIRE_THROWS_WITH(eliminate_conformal(shifted, hat3),
                        Catch::Matchers::ContainsSubstring("not conforming"));
}
