#ifndef MTSA_SOLVER_HPP
#define MTSA_SOLVER_HPP

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "mtsa/system.hpp"

namespace mtsa {

struct TransientConfig {
    double dt = 0.01;           // s
    double t_end = 2.0;         // s
    double picard_tol = 1e-8;   // relative update norm
    int picard_max_iters = 50;
    double t0 = 4.2;            // initial temperature, K
    bool early_exit = false;    // stop once steady (relative change < steady_tol)
    double steady_tol = 1e-10;

    void check() const {
        if (dt <= 0.0) throw Error("dt must be positive");
        if (t_end < dt) throw Error("t_end must be at least dt");
        if (picard_tol <= 0.0) throw Error("picard_tol must be positive");
    }
};

struct TransientState {
    double time = 0.0;
    Vector x;  // volume T, sheets, multipliers
    int picard_iters = 0;
    double picard_update = 0.0;
    double solve_residual = 0.0;
};

namespace detail {

// Normwise backward error ||Ax-b|| / (||A|| ||x|| + ||b||); enforced after
// one step of iterative refinement, so values above 1e-10 flag a genuinely
// broken solve rather than conditioning.
inline void check_residual(const SparseMat& a, const Vector& x, const Vector& b) {
    double a_norm = 0.0;
    for (int k = 0; k < a.nonZeros(); ++k) a_norm = std::max(a_norm, std::abs(a.valuePtr()[k]));
    const double scale = a_norm * x.norm() + b.norm();
    const double res = (a * x - b).norm() / (scale > 0.0 ? scale : 1.0);
    if (!(res < 1e-10)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", res);
        throw Error("linear solve residual too large: " + std::string(buf));
    }
}

}  // namespace detail

/// Direct solver for the (possibly saddle-point) systems produced by the
/// assembly. Reuses the symbolic analysis across repeated solves with the
/// same sparsity pattern (Picard iterations, time steps). When the system is
/// known to be symmetric positive definite (no multiplier DoFs) a sparse
/// LDLT is used instead of LU; the residual check guards the assumption.
class SaddleSolver {
public:
    explicit SaddleSolver(bool spd = false) : spd_(spd) {}

    Vector solve(const SparseMat& a, const Vector& b) {
        Vector x;
        if (spd_) {
            if (!analyzed_) ldlt_.analyzePattern(a);
            ldlt_.factorize(a);
            if (ldlt_.info() != Eigen::Success) throw Error("singular factorization");
            x = ldlt_.solve(b);
            x += ldlt_.solve(b - a * x);  // one refinement step
        } else {
            if (!analyzed_) lu_.analyzePattern(a);
            lu_.factorize(a);
            if (lu_.info() != Eigen::Success)
                throw Error("singular factorization: " + std::string(lu_.lastErrorMessage()));
            x = lu_.solve(b);
            x += lu_.solve(b - a * x);  // one refinement step
        }
        analyzed_ = true;
        detail::check_residual(a, x, b);
        return x;
    }

private:
    bool spd_;
    bool analyzed_ = false;
    Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu_;
    Eigen::SimplicialLDLT<SparseMat> ldlt_;
};

/// One-shot direct solve of a saddle system.
inline Vector solve_saddle(const SparseMat& a, const Vector& b) {
    return SaddleSolver(false).solve(a, b);
}

/// Initial state: uniform temperature on volume and sheet DoFs, zero
/// multipliers.
inline TransientState initial_state(const DofMap& dm, double t0) {
    TransientState st;
    st.x = Vector::Zero(dm.total);
    for (int i = 0; i < dm.total; ++i)
        if (!dm.is_multiplier(i)) st.x[i] = t0;
    return st;
}

namespace detail {

inline bool any_multipliers(const DofMap& dm) {
    for (int i = 0; i < dm.total; ++i)
        if (dm.is_multiplier(i)) return true;
    return false;
}

inline double update_norm(const DofMap& dm, const Vector& a, const Vector& b) {
    // Relative update over the temperature DoFs only.
    double dn = 0.0, xn = 0.0;
    for (int i = 0; i < dm.total; ++i) {
        if (dm.is_multiplier(i)) continue;
        dn += (a[i] - b[i]) * (a[i] - b[i]);
        xn += a[i] * a[i];
    }
    return std::sqrt(dn) / std::max(std::sqrt(xn), 1e-300);
}

}  // namespace detail

struct StepResult {
    TransientState state;
    AssembledSystem system;  // assembled at the converged iterate
};

/// One implicit-Euler step with Picard iteration on the material
/// coefficients. dt_inv == 0 solves the steady problem.
inline StepResult step_impl(const Problem& problem, const DofMap& dm, const TransientState& prev,
                            const TransientConfig& cfg, double dt_inv,
                            SaddleSolver* solver = nullptr) {
    SaddleSolver local(detail::any_multipliers(dm) ? false : true);
    if (!solver) solver = &local;
    Vector x_star = prev.x;
    StepResult out;
    for (int it = 1; it <= cfg.picard_max_iters; ++it) {
        AssembledSystem sys = assemble_system(problem, dm, x_star, prev.x, dt_inv);
        ReducedSystem red = apply_dirichlet(sys.a, sys.b, sys.dirichlet);
        Vector x_red = solver->solve(red.A, red.b);
        Vector x_new = red.reconstruct(x_red);
        for (int i = 0; i < dm.total; ++i)
            if (!std::isfinite(x_new[i])) throw Error("non-finite solution component");
        const double upd = detail::update_norm(dm, x_new, x_star);
        x_star = std::move(x_new);
        if (upd < cfg.picard_tol) {
            out.state.time = prev.time + (dt_inv != 0.0 ? 1.0 / dt_inv : 0.0);
            out.state.x = std::move(x_star);
            out.state.picard_iters = it;
            out.state.picard_update = upd;
            const double bn = red.b.norm();
            out.state.solve_residual = (red.A * x_red - red.b).norm() / (bn > 0.0 ? bn : 1.0);
            out.system = std::move(sys);
            return out;
        }
        if (it == cfg.picard_max_iters)
            throw Error("Picard did not converge after " + std::to_string(it) +
                        " iterations (last update " + std::to_string(upd) + ")");
    }
    throw Error("unreachable");
}

inline TransientState step(const Problem& problem, const DofMap& dm, const TransientState& prev,
                           const TransientConfig& cfg) {
    cfg.check();
    return step_impl(problem, dm, prev, cfg, 1.0 / cfg.dt).state;
}

/// Steady solve (no transient term); Picard handles nonlinear materials.
inline TransientState solve_steady(const Problem& problem, const DofMap& dm,
                                   const TransientConfig& cfg) {
    TransientState init = initial_state(dm, cfg.t0);
    return step_impl(problem, dm, init, cfg, 0.0).state;
}

/// Full transient run: states at every time level, initial state included.
inline std::vector<TransientState> run_transient(const Problem& problem, const DofMap& dm,
                                                 const TransientConfig& cfg) {
    cfg.check();
    std::vector<TransientState> states;
    states.push_back(initial_state(dm, cfg.t0));
    SaddleSolver solver(!detail::any_multipliers(dm));
    const int n_steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    for (int n = 1; n <= n_steps; ++n) {
        TransientState next =
            step_impl(problem, dm, states.back(), cfg, 1.0 / cfg.dt, &solver).state;
        next.time = n * cfg.dt;
        const double change = detail::update_norm(dm, next.x, states.back().x);
        states.push_back(std::move(next));
        log::debug("t=%.6g picard=%d change=%.3e", states.back().time,
                   states.back().picard_iters, change);
        if (cfg.early_exit && change < cfg.steady_tol) {
            log::info("steady state reached at t=%.6g", states.back().time);
            break;
        }
    }
    return states;
}

/// Discrete backward-Euler energy balance of one step, for linear
/// (constant-property) problems only. All power terms are measured from
/// the assembled blocks; returns |imbalance| / (largest power scale).
inline double energy_balance(const Problem& problem, const DofMap& dm, const TransientState& prev,
                             const TransientState& next, double dt) {
    for (const auto& [tag, m] : problem.materials)
        if (!m.is_constant())
            throw Error("energy balance requires constant-property materials");
    for (const auto& [name, cfg] : problem.tsa)
        for (const auto& m : cfg.stack.layer_material)
            if (!m.is_constant())
                throw Error("energy balance requires constant-property materials");

    const double dt_inv = 1.0 / dt;
    AssembledSystem sys = assemble_system(problem, dm, next.x, prev.x, dt_inv);

    const Vector xv_new = next.x.head(dm.n_volume);
    const Vector xv_old = prev.x.head(dm.n_volume);
    const Vector ones_v = Vector::Ones(dm.n_volume);

    double de_dt = dt_inv * ones_v.dot(sys.blocks.M * (xv_new - xv_old));
    double p_source = ones_v.dot(sys.blocks.f);
    double p_robin = ones_v.dot(sys.blocks.R * xv_new) - sys.blocks.r.sum();
    double p_cond = ones_v.dot(sys.blocks.K * xv_new);
    double e_rate_scale = std::abs(dt_inv * ones_v.dot(sys.blocks.M * xv_new));

    for (std::size_t fi = 0; fi < dm.ifaces.size(); ++fi) {
        const InterfaceDofs& f = dm.ifaces[fi];
        const TsaOperator& op = sys.tsa_ops[fi];
        const int nd = (f.n_layers + 1) * f.m;
        Vector xs_new(nd), xs_old(nd);
        for (int j = 0; j <= f.n_layers; ++j)
            for (int i = 0; i < f.m; ++i) {
                xs_new[j * f.m + i] = next.x[f.sheet_dof(j, i)];
                xs_old[j * f.m + i] = prev.x[f.sheet_dof(j, i)];
            }
        const Vector ones_s = Vector::Ones(nd);
        if (f.cfg->stack.include_heat_capacity) {
            de_dt += dt_inv * ones_s.dot(op.m * (xs_new - xs_old));
            e_rate_scale += std::abs(dt_inv * ones_s.dot(op.m * xs_new));
        }
        p_source += op.q.sum();
        p_cond += ones_s.dot(op.a * xs_new);
    }

    // Net coupling power over the temperature families (zero by constraint
    // consistency, measured here).
    double p_coupling = 0.0;
    for (std::size_t c = 0; c < sys.couplings.size(); ++c) {
        const MortarCoupling& mc = sys.couplings[c];
        const int lam = sys.coupling_lambda[c];
        Vector lam_vals(mc.d_ext.rows());
        for (int i = 0; i < lam_vals.size(); ++i) lam_vals[i] = next.x[lam + i];
        // +D_ext^T lambda on volume rows, -D_shell^T lambda on sheet rows.
        p_coupling += (mc.d_ext.transpose() * lam_vals).sum();
        p_coupling -= (mc.d_shell.transpose() * lam_vals).sum();
    }

    // Reaction flux through Dirichlet-constrained rows.
    double p_flux = 0.0;
    if (!sys.dirichlet.values.empty()) {
        const Vector r_full = sys.a * next.x - sys.b;
        for (const auto& [dof, val] : sys.dirichlet.values) p_flux += r_full[dof];
    }

    const double imbalance = de_dt + p_cond + p_robin + p_coupling + p_flux - p_source;
    const double scale = std::max({std::abs(p_source), std::abs(p_robin), std::abs(p_flux),
                                   std::abs(de_dt), e_rate_scale, 1e-30});
    return std::abs(imbalance) / scale;
}

}  // namespace mtsa

#endif
