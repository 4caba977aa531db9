#ifndef MTSA_TSA_HPP
#define MTSA_TSA_HPP

#include <Eigen/Dense>

#include "mtsa/assembly.hpp"
#include "mtsa/materials.hpp"
#include "mtsa/mesh.hpp"

namespace mtsa {

/// The N virtual layers of one collapsed insulation line: through-thickness
/// breakpoints w_0 < ... < w_N, a material and source per layer, first-order
/// Lagrange basis in w.
struct TsaStack {
    std::vector<double> breakpoints;      // size N+1
    std::vector<Material> layer_material; // size N
    std::vector<double> layer_q;          // size N, W/m^3
    bool include_heat_capacity = true;

    int n_layers() const { return static_cast<int>(layer_material.size()); }
    double thickness() const { return breakpoints.back() - breakpoints.front(); }
    double layer_thickness(int k) const { return breakpoints[k] - breakpoints[k - 1]; }

    static TsaStack uniform(int n, double thickness, const Material& m, double q = 0.0) {
        if (n < 1) throw Error("TSA stack needs at least one layer");
        if (thickness <= 0.0) throw Error("TSA stack needs positive thickness");
        TsaStack s;
        s.breakpoints.resize(n + 1);
        for (int k = 0; k <= n; ++k)
            s.breakpoints[k] = (k == n) ? thickness : k * (thickness / n);
        s.layer_material.assign(n, m);
        s.layer_q.assign(n, q);
        return s;
    }

    void check() const {
        const int n = n_layers();
        if (n < 1) throw Error("TSA stack needs at least one layer");
        if (static_cast<int>(breakpoints.size()) != n + 1 ||
            static_cast<int>(layer_q.size()) != n)
            throw Error("TSA stack size mismatch");
        for (int k = 1; k <= n; ++k)
            if (breakpoints[k] <= breakpoints[k - 1])
                throw Error("TSA breakpoints must be strictly increasing");
    }
};

/// 1D through-thickness matrices of one layer, Eq.-level building block
/// for w-constant coefficients over the layer.
struct Tsa1dLayer {
    Eigen::Matrix2d k_hat;    // through-thickness stiffness
    Eigen::Matrix2d m_kappa;  // kappa-weighted mass
    Eigen::Matrix2d m_cv;     // c_v-weighted mass
    Eigen::Vector2d q_hat;    // source load
};

inline Tsa1dLayer tsa_1d_layer_constants(double dk, double kappa, double cv, double q) {
    if (dk <= 0.0) throw Error("non-positive layer thickness");
    Tsa1dLayer l;
    l.k_hat << kappa / dk, -kappa / dk, -kappa / dk, kappa / dk;
    l.m_kappa << 2.0, 1.0, 1.0, 2.0;
    l.m_kappa *= kappa * dk / 6.0;
    l.m_cv << 2.0, 1.0, 1.0, 2.0;
    l.m_cv *= cv * dk / 6.0;
    l.q_hat << q * dk / 2.0, q * dk / 2.0;
    return l;
}

/// Layer matrices with material properties evaluated at `t_eval`
/// (Picard-lagged, constant through the layer).
inline Tsa1dLayer tsa_1d_matrices(const TsaStack& stack, int k, double t_eval) {
    if (k < 1 || k > stack.n_layers()) throw Error("layer index out of range");
    const Material& m = stack.layer_material[k - 1];
    return tsa_1d_layer_constants(stack.layer_thickness(k), m.kappa.eval(t_eval),
                                  m.c_v.eval(t_eval), stack.layer_q[k - 1]);
}

/// Piecewise-constant tangential derivative of a sheet field along a trace.
inline std::vector<double> tsa_tangential_gradient(const TraceMesh& trace,
                                                   const std::vector<double>& values) {
    if (trace.size() < 2) throw Error("trace needs at least two nodes");
    if (values.size() != trace.size()) throw Error("sheet value count mismatch");
    std::vector<double> d(trace.segments());
    for (std::size_t e = 0; e < d.size(); ++e) {
        const double ds = trace.s[e + 1] - trace.s[e];
        if (ds <= 0.0) throw Error("zero-length segment");
        d[e] = (values[e + 1] - values[e]) / ds;
    }
    return d;
}

/// Assembled shell operator on the sheet DoF space (layout: sheet j major,
/// trace node i minor, dof = j*m + i).
struct TsaOperator {
    SparseMat a;   // steady part: through-thickness + tangential conduction
    SparseMat m;   // c_v mass (zero matrix if heat capacity disabled)
    Vector q;      // shell source load
    int n_sheets = 0;
    int n_trace = 0;
};

/// Shell assembly over the virtual trace: for each trace segment and each
/// layer, the trace mass matrix weighted by the through-thickness stiffness,
/// the trace stiffness weighted by the through-thickness mass, the c_v
/// transient mass, and the source load. 2-point Gauss in s (exact here).
/// `t_sheets` is the Picard iterate, (N+1) x m.
inline TsaOperator assemble_tsa(const TraceMesh& trace, const TsaStack& stack,
                                const Eigen::MatrixXd& t_sheets) {
    stack.check();
    const int n = stack.n_layers();
    const int m = static_cast<int>(trace.size());
    if (m < 2) throw Error("virtual trace needs at least two nodes");
    if (t_sheets.rows() != n + 1 || t_sheets.cols() != m)
        throw Error("sheet count mismatch with layer count");

    const int ndof = (n + 1) * m;
    SparseBuilder ab(ndof, ndof), mb(ndof, ndof);
    TsaOperator op;
    op.q = Vector::Zero(ndof);
    op.n_sheets = n + 1;
    op.n_trace = m;
    auto dof = [m](int sheet, int node) { return sheet * m + node; };

    for (int e = 0; e < m - 1; ++e) {
        const double ds = trace.s[e + 1] - trace.s[e];
        if (ds <= 0.0) throw Error("zero-length trace segment");
        // Trace-element P1 matrices.
        const double mass_diag = ds / 3.0, mass_off = ds / 6.0;
        const double stiff = 1.0 / ds;
        for (int k = 1; k <= n; ++k) {
            const double t_eval = 0.25 * (t_sheets(k - 1, e) + t_sheets(k, e) +
                                          t_sheets(k - 1, e + 1) + t_sheets(k, e + 1));
            const Tsa1dLayer lay = tsa_1d_matrices(stack, k, t_eval);
            for (int a = 0; a < 2; ++a) {
                const int sa = k - 1 + a;
                for (int b = 0; b < 2; ++b) {
                    const int sb = k - 1 + b;
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            const double tm = (i == j) ? mass_diag : mass_off;
                            const double ts = (i == j) ? stiff : -stiff;
                            ab.add(dof(sa, e + i), dof(sb, e + j),
                                   lay.k_hat(a, b) * tm + lay.m_kappa(a, b) * ts);
                            if (stack.include_heat_capacity)
                                mb.add(dof(sa, e + i), dof(sb, e + j), lay.m_cv(a, b) * tm);
                        }
                }
                op.q[dof(sa, e)] += lay.q_hat(a) * ds / 2.0;
                op.q[dof(sa, e + 1)] += lay.q_hat(a) * ds / 2.0;
            }
        }
    }
    op.a = ab.finalize();
    op.m = mb.finalize();
    return op;
}

}  // namespace mtsa

#endif
