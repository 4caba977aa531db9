#ifndef MTSA_MORTAR_HPP
#define MTSA_MORTAR_HPP

#include <Eigen/Dense>

#include "mtsa/assembly.hpp"
#include "mtsa/mesh.hpp"

namespace mtsa {

/// P1 multiplier space carried by the designated virtual trace.
struct MultiplierSpace {
    const TraceMesh* carrier = nullptr;
    int side = 1;  // 1 couples gamma1 <-> sheet 0, 2 couples gamma2 <-> sheet N
    int size() const { return static_cast<int>(carrier->size()); }
};

/// Merged 1D partition of two traces over the same geometric curve,
/// expressed in trace A's arc-length parametrization. Products of P1
/// functions from either side are polynomial per merged segment.
struct CommonRefinement {
    std::vector<double> s;       // merged breakpoints, A parametrization, starting at 0
    std::vector<int> parent_a;   // per merged segment
    std::vector<int> parent_b;
    bool b_reversed = false;
    double length_b = 0.0;

    std::size_t segments() const { return s.empty() ? 0 : s.size() - 1; }
    /// Maps an A-parametrization coordinate to B's arc length.
    double to_b(double sa) const { return b_reversed ? length_b - sa : sa; }
};

namespace detail {

/// Tangential coordinate of point p along the chord of `ref`, measured from
/// the chord start. The normal offset (collapsed layer thickness) is ignored.
inline double chord_coord(const TraceMesh& ref, const Vec2& p) {
    const Vec2 a = ref.xy.front();
    const Vec2 b = ref.xy.back();
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len <= 0.0) throw Error("degenerate trace chord");
    return (p - a).dot(d) * (1.0 / len);
}

inline int find_segment(const std::vector<double>& s, double x) {
    // s ascending; returns segment index containing x.
    int lo = 0, hi = static_cast<int>(s.size()) - 2;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (s[mid] <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

}  // namespace detail

inline CommonRefinement common_refinement(const TraceMesh& a, const TraceMesh& b) {
    if (a.size() < 2 || b.size() < 2) throw Error("empty refinement");
    const double len_a = a.length();
    const double len_b = b.length();
    if (std::abs(len_a - len_b) > kGeomTol + 1e-12 * len_a)
        throw Error("overlapping inconsistent parametrizations (trace lengths differ)");

    // Pair endpoints in the tangential coordinate to detect reversal.
    const double pb0 = detail::chord_coord(a, b.xy.front());
    const double pb1 = detail::chord_coord(a, b.xy.back());
    const double tol = 10.0 * kGeomTol + 1e-12 * len_a;
    CommonRefinement cr;
    cr.length_b = len_b;
    if (std::abs(pb0) <= tol && std::abs(pb1 - len_a) <= tol) {
        cr.b_reversed = false;
    } else if (std::abs(pb0 - len_a) <= tol && std::abs(pb1) <= tol) {
        cr.b_reversed = true;
    } else {
        throw Error("trace endpoint mismatch");
    }

    std::vector<double> merged;
    for (double sv : a.s) merged.push_back(sv - a.s.front());
    for (double sv : b.s) {
        const double sb = sv - b.s.front();
        merged.push_back(cr.b_reversed ? len_b - sb : sb);
    }
    std::sort(merged.begin(), merged.end());
    cr.s.push_back(merged.front());
    for (double sv : merged)
        if (sv - cr.s.back() > kGeomTol) cr.s.push_back(sv);
    // Clamp the global endpoints exactly.
    cr.s.front() = 0.0;
    cr.s.back() = len_a;

    std::vector<double> sa(a.s), sb(b.s);
    for (auto& v : sa) v -= a.s.front();
    for (auto& v : sb) v -= b.s.front();
    for (std::size_t e = 0; e + 1 < cr.s.size(); ++e) {
        const double mid = 0.5 * (cr.s[e] + cr.s[e + 1]);
        cr.parent_a.push_back(detail::find_segment(sa, mid));
        cr.parent_b.push_back(detail::find_segment(sb, cr.to_b(mid)));
    }
    return cr;
}

/// Coupling matrix D(i,j) = int phi^lambda_i phi^side_j ds over the shared
/// curve; exact for products of P1 functions (2-point Gauss per merged
/// segment). Rows follow the multiplier carrier, columns the side trace.
inline SparseMat coupling_matrix(const TraceMesh& lambda_carrier, const TraceMesh& side) {
    const CommonRefinement cr = common_refinement(lambda_carrier, side);
    const int n_lam = static_cast<int>(lambda_carrier.size());
    const int n_side = static_cast<int>(side.size());
    SparseBuilder db(n_lam, n_side);

    std::vector<double> sl(lambda_carrier.s), ss(side.s);
    for (auto& v : sl) v -= lambda_carrier.s.front();
    for (auto& v : ss) v -= side.s.front();

    // 2-point Gauss on [0,1].
    constexpr double g0 = 0.2113248654051871177454256097490212721762;
    constexpr double g1 = 1.0 - g0;
    const double gp[2] = {g0, g1};

    for (std::size_t e = 0; e < cr.segments(); ++e) {
        const double s0 = cr.s[e], s1 = cr.s[e + 1];
        const double ds = s1 - s0;
        const int pa = cr.parent_a[e];
        const int pb = cr.parent_b[e];
        const double la0 = sl[pa], la1 = sl[pa + 1];
        const double lb0 = ss[pb], lb1 = ss[pb + 1];
        for (double g : gp) {
            const double s = s0 + g * ds;
            const double w = 0.5 * ds;
            const double xa = (s - la0) / (la1 - la0);
            const double xb = (cr.to_b(s) - lb0) / (lb1 - lb0);
            const double phi_l[2] = {1.0 - xa, xa};
            const double phi_s[2] = {1.0 - xb, xb};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    db.add(pa + i, pb + j, w * phi_l[i] * phi_s[j]);
        }
    }
    return db.finalize();
}

/// One assembled mortar interface side: the constraint
/// D_ext * T|_trace - D_shell * That|_sheet = 0 in weak form.
struct MortarCoupling {
    SparseMat d_ext;    // n_lambda x n_ext_trace
    SparseMat d_shell;  // n_lambda x n_hat
    const TraceMesh* ext_trace = nullptr;
    const TraceMesh* hat_trace = nullptr;
    int side = 1;
};

inline MortarCoupling assemble_coupling(const TraceMesh& ext_trace, const TraceMesh& hat_trace,
                                        int side) {
    MortarCoupling c;
    c.d_ext = coupling_matrix(hat_trace, ext_trace);
    c.d_shell = coupling_matrix(hat_trace, hat_trace);
    c.ext_trace = &ext_trace;
    c.hat_trace = &hat_trace;
    c.side = side;
    return c;
}

/// DoF identification for a conforming interface side: hat node index ->
/// external volume node id. The corresponding multiplier is dropped.
inline std::vector<int> eliminate_conformal(const TraceMesh& ext_trace,
                                            const TraceMesh& hat_trace) {
    const std::size_t n = hat_trace.size();
    if (ext_trace.size() != n) throw Error("traces not conforming (node counts differ)");
    const CommonRefinement cr = common_refinement(hat_trace, ext_trace);
    std::vector<int> map(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const double sh = hat_trace.s[i] - hat_trace.s.front();
        const std::size_t j = cr.b_reversed ? n - 1 - i : i;
        const double se = ext_trace.s[j] - ext_trace.s.front();
        if (std::abs((cr.b_reversed ? ext_trace.length() - se : se) - sh) > 10.0 * kGeomTol)
            throw Error("traces not conforming (node positions differ)");
        map[i] = ext_trace.node_ids[j];
    }
    return map;
}

}  // namespace mtsa

#endif
