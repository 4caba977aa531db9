#ifndef MTSA_SYSTEM_HPP
#define MTSA_SYSTEM_HPP

#include <map>
#include <string>
#include <vector>

#include "mtsa/assembly.hpp"
#include "mtsa/mortar.hpp"
#include "mtsa/tsa.hpp"

namespace mtsa {

struct TsaInterfaceConfig {
    TsaStack stack;
    bool eliminate_side1 = false;  // identify sheet 0 with the gamma1 trace
    bool eliminate_side2 = false;  // identify sheet N with the gamma2 trace
};

struct Problem {
    Mesh mesh;
    std::map<int, Material> materials;  // region tag -> material
    SourceSpec source;
    std::vector<BoundaryCondition> bcs;
    std::map<std::string, TsaInterfaceConfig> tsa;  // by interface name
    DirichletValues extra_dirichlet;                // volume-dof constraints beyond bcs
};

/// DoF bookkeeping for one collapsed interface: sheet families j = 0..N
/// on the virtual trace plus up to two multiplier families. A sheet that
/// was conformally eliminated aliases the external trace's volume DoFs.
struct InterfaceDofs {
    std::string name;
    const TraceMesh* g1 = nullptr;
    const TraceMesh* g2 = nullptr;
    const TraceMesh* hat = nullptr;
    const TsaInterfaceConfig* cfg = nullptr;
    int n_layers = 0;
    int m = 0;                      // hat trace node count
    std::vector<int> sheet_offset;  // N+1 entries; -1 means aliased
    std::vector<int> alias_first;   // hat node -> volume node id (sheet 0)
    std::vector<int> alias_last;    // hat node -> volume node id (sheet N)
    int lam1 = -1;
    int lam2 = -1;

    int sheet_dof(int j, int i) const {
        if (sheet_offset[j] >= 0) return sheet_offset[j] + i;
        return (j == 0) ? alias_first[i] : alias_last[i];
    }
    bool sheet_aliased(int j) const { return sheet_offset[j] < 0; }
};

/// Global DoF layout: volume temperatures first (dof == node id), then per
/// interface the non-aliased sheets, then the multipliers.
struct DofMap {
    int n_volume = 0;
    int total = 0;
    std::vector<InterfaceDofs> ifaces;

    bool is_multiplier(int dof) const {
        for (const auto& f : ifaces) {
            if (f.lam1 >= 0 && dof >= f.lam1 && dof < f.lam1 + f.m) return true;
            if (f.lam2 >= 0 && dof >= f.lam2 && dof < f.lam2 + f.m) return true;
        }
        return false;
    }
};

inline DofMap build_dofmap(const Problem& problem) {
    DofMap dm;
    dm.n_volume = static_cast<int>(problem.mesh.nodes.size());
    int next = dm.n_volume;
    for (const auto& ci : problem.mesh.interfaces) {
        auto cit = problem.tsa.find(ci.name);
        if (cit == problem.tsa.end())
            throw Error("collapsed interface '" + ci.name + "' has no TSA stack");
        const TsaInterfaceConfig& cfg = cit->second;
        cfg.stack.check();
        InterfaceDofs f;
        f.name = ci.name;
        f.g1 = &problem.mesh.traces[ci.gamma1_trace];
        f.g2 = &problem.mesh.traces[ci.gamma2_trace];
        f.hat = &problem.mesh.traces[ci.gammahat_trace];
        f.cfg = &cfg;
        f.n_layers = cfg.stack.n_layers();
        f.m = static_cast<int>(f.hat->size());
        f.sheet_offset.assign(f.n_layers + 1, -1);
        for (int j = 0; j <= f.n_layers; ++j) {
            if (j == 0 && cfg.eliminate_side1) {
                f.alias_first = eliminate_conformal(*f.g1, *f.hat);
                continue;
            }
            if (j == f.n_layers && cfg.eliminate_side2) {
                f.alias_last = eliminate_conformal(*f.g2, *f.hat);
                continue;
            }
            f.sheet_offset[j] = next;
            next += f.m;
        }
        if (!cfg.eliminate_side1) {
            f.lam1 = next;
            next += f.m;
        }
        if (!cfg.eliminate_side2) {
            f.lam2 = next;
            next += f.m;
        }
        dm.ifaces.push_back(std::move(f));
    }
    dm.total = next;
    return dm;
}

/// Fully assembled (pre-elimination) saddle system at one Picard iterate,
/// with the building blocks kept for diagnostics.
struct AssembledSystem {
    SparseMat a;
    Vector b;
    SystemBlocks blocks;                   // volume-family pieces
    std::vector<TsaOperator> tsa_ops;      // per interface
    std::vector<MortarCoupling> couplings; // active multiplier sides
    std::vector<int> coupling_lambda;      // lambda offset per coupling
    std::vector<int> coupling_iface;       // owning interface index
    DirichletValues dirichlet;
};

/// Gathers the sheet iterate (N+1 x m) of one interface from the full vector.
inline Eigen::MatrixXd gather_sheets(const InterfaceDofs& f, const Vector& x) {
    Eigen::MatrixXd t(f.n_layers + 1, f.m);
    for (int j = 0; j <= f.n_layers; ++j)
        for (int i = 0; i < f.m; ++i) t(j, i) = x[f.sheet_dof(j, i)];
    return t;
}

/// dt_inv == 0 assembles the steady problem (no mass terms).
inline AssembledSystem assemble_system(const Problem& problem, const DofMap& dm,
                                       const Vector& x_star, const Vector& x_old,
                                       double dt_inv) {
    if (x_star.size() != dm.total || x_old.size() != dm.total)
        throw Error("state vector size mismatch");
    AssembledSystem sys;
    sys.blocks = assemble_blocks(problem.mesh, problem.materials, problem.source, problem.bcs,
                                 x_star.head(dm.n_volume));

    SparseBuilder ab(dm.total, dm.total);
    sys.b = Vector::Zero(dm.total);

    auto emit = [&ab](const SparseMat& m, double scale, auto row_map, auto col_map) {
        for (int col = 0; col < m.outerSize(); ++col)
            for (SparseMat::InnerIterator it(m, col); it; ++it)
                ab.add(row_map(static_cast<int>(it.row())), col_map(col), scale * it.value());
    };
    auto ident = [](int i) { return i; };

    emit(sys.blocks.K, 1.0, ident, ident);
    emit(sys.blocks.R, 1.0, ident, ident);
    sys.b.head(dm.n_volume) += sys.blocks.f + sys.blocks.r;
    if (dt_inv != 0.0) {
        emit(sys.blocks.M, dt_inv, ident, ident);
        sys.b.head(dm.n_volume) += dt_inv * (sys.blocks.M * x_old.head(dm.n_volume));
    }

    for (std::size_t fi = 0; fi < dm.ifaces.size(); ++fi) {
        const InterfaceDofs& f = dm.ifaces[fi];
        const Eigen::MatrixXd t_star = gather_sheets(f, x_star);
        TsaOperator op = assemble_tsa(*f.hat, f.cfg->stack, t_star);
        auto smap = [&f](int local) { return f.sheet_dof(local / f.m, local % f.m); };
        emit(op.a, 1.0, smap, smap);
        for (int d = 0; d < op.q.size(); ++d) sys.b[smap(d)] += op.q[d];
        if (dt_inv != 0.0 && f.cfg->stack.include_heat_capacity) {
            emit(op.m, dt_inv, smap, smap);
            Vector sheets_old(op.q.size());
            const Eigen::MatrixXd t_old = gather_sheets(f, x_old);
            for (int j = 0; j <= f.n_layers; ++j)
                for (int i = 0; i < f.m; ++i) sheets_old[j * f.m + i] = t_old(j, i);
            const Vector mo = dt_inv * (op.m * sheets_old);
            for (int d = 0; d < mo.size(); ++d) sys.b[smap(d)] += mo[d];
        }
        sys.tsa_ops.push_back(std::move(op));

        // Modified interface contributions: -B on the external residual,
        // +B_hat on the shell residual, constraint rows at the multipliers.
        auto add_side = [&](const TraceMesh& ext, int lam, int sheet_j) {
            if (lam < 0) return;
            MortarCoupling c = assemble_coupling(ext, *f.hat, sheet_j == 0 ? 1 : 2);
            for (int col = 0; col < c.d_ext.outerSize(); ++col)
                for (SparseMat::InnerIterator it(c.d_ext, col); it; ++it) {
                    const int lrow = lam + static_cast<int>(it.row());
                    const int vdof = ext.node_ids[col];
                    ab.add(lrow, vdof, it.value());
                    ab.add(vdof, lrow, it.value());
                }
            for (int col = 0; col < c.d_shell.outerSize(); ++col)
                for (SparseMat::InnerIterator it(c.d_shell, col); it; ++it) {
                    const int lrow = lam + static_cast<int>(it.row());
                    const int sdof = f.sheet_dof(sheet_j, col);
                    ab.add(lrow, sdof, -it.value());
                    ab.add(sdof, lrow, -it.value());
                }
            sys.couplings.push_back(std::move(c));
            sys.coupling_lambda.push_back(lam);
            sys.coupling_iface.push_back(static_cast<int>(fi));
        };
        add_side(*f.g1, f.lam1, 0);
        add_side(*f.g2, f.lam2, f.n_layers);
    }

    sys.a = ab.finalize();
    sys.dirichlet = dirichlet_from_bcs(problem.mesh, problem.bcs);
    for (const auto& [dof, val] : problem.extra_dirichlet.values) sys.dirichlet.set(dof, val);
    return sys;
}

}  // namespace mtsa

#endif
