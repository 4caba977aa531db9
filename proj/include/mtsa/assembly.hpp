#ifndef MTSA_ASSEMBLY_HPP
#define MTSA_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <map>
#include <vector>

#include "mtsa/materials.hpp"
#include "mtsa/mesh.hpp"

namespace mtsa {

using SparseMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Triplet accumulator with deterministic finalization: triplets are
/// sorted by (row, col, value) before summation, so the assembled matrix
/// is bit-identical regardless of insertion order.
class SparseBuilder {
  public:
    SparseBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}

    void add(int row, int col, double value) {
        if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
            throw Error("sparse triplet out of range");
        if (value != 0.0) trip_.push_back({row, col, value});
    }

    SparseMat finalize() const {
        std::vector<Entry> t = trip_;
        std::sort(t.begin(), t.end(), [](const Entry& a, const Entry& b) {
            if (a.row != b.row) return a.row < b.row;
            if (a.col != b.col) return a.col < b.col;
            return a.value < b.value;
        });
        std::vector<Eigen::Triplet<double>> merged;
        merged.reserve(t.size());
        for (std::size_t i = 0; i < t.size();) {
            double sum = 0.0;
            std::size_t j = i;
            while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) sum += t[j++].value;
            merged.emplace_back(t[i].row, t[i].col, sum);
            i = j;
        }
        SparseMat m(rows_, cols_);
        m.setFromTriplets(merged.begin(), merged.end());
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

  private:
    struct Entry {
        int row, col;
        double value;
    };
    int rows_, cols_;
    std::vector<Entry> trip_;
};

struct BoundaryCondition {
    enum class Kind { dirichlet, neumann_adiabatic, robin };
    Kind kind = Kind::neumann_adiabatic;
    int curve_tag = 0;
    double g = 0.0;      // dirichlet value, K
    double h = 0.0;      // robin coefficient, W/(m^2 K)
    double t_ref = 0.0;  // robin reference temperature, K
};

/// Each boundary curve tag may carry at most one BC kind.
inline void check_bcs(const std::vector<BoundaryCondition>& bcs) {
    std::map<int, BoundaryCondition::Kind> seen;
    for (const auto& bc : bcs) {
        auto [it, inserted] = seen.emplace(bc.curve_tag, bc.kind);
        if (!inserted)
            throw Error("curve tag " + std::to_string(bc.curve_tag) +
                        " carries more than one boundary condition");
        if (bc.kind == BoundaryCondition::Kind::robin && bc.h < 0.0)
            throw Error("negative Robin coefficient");
    }
}

struct P1Element {
    double area = 0.0;
    std::array<Vec2, 3> grad{};  // constant shape-function gradients
};

inline P1Element p1_element(const std::array<Vec2, 3>& p) {
    const double det =
        (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    if (det <= 0.0) throw Error("degenerate or inverted element");
    P1Element e;
    e.area = 0.5 * det;
    e.grad[0] = {(p[1].y - p[2].y) / det, (p[2].x - p[1].x) / det};
    e.grad[1] = {(p[2].y - p[0].y) / det, (p[0].x - p[2].x) / det};
    e.grad[2] = {(p[0].y - p[1].y) / det, (p[1].x - p[0].x) / det};
    return e;
}

struct SystemBlocks {
    SparseMat K;  // stiffness at linearization field
    SparseMat M;  // c_v-scaled mass
    Vector f;     // source load
    SparseMat R;  // Robin boundary matrix
    Vector r;     // Robin boundary load
};

/// Volume assembly at linearization field `t_star` (one value per node).
/// Properties are evaluated at the element-centroid temperature.
inline void assemble_volume(const Mesh& mesh, const std::map<int, Material>& materials,
                            const SourceSpec& source, const Vector& t_star, SystemBlocks& out) {
    const int n = static_cast<int>(mesh.nodes.size());
    if (t_star.size() != n) throw Error("linearization field size mismatch");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(t_star[i])) throw Error("non-finite linearization temperature");

    SparseBuilder kb(n, n), mb(n, n);
    out.f = Vector::Zero(n);
    for (const auto& tri : mesh.triangles) {
        auto mit = materials.find(tri.region_tag);
        if (mit == materials.end())
            throw Error("no material assigned to region tag " + std::to_string(tri.region_tag));
        std::array<Vec2, 3> p;
        for (int k = 0; k < 3; ++k) p[k] = {mesh.nodes[tri.n[k]].x, mesh.nodes[tri.n[k]].y};
        const P1Element el = p1_element(p);
        const double tc = (t_star[tri.n[0]] + t_star[tri.n[1]] + t_star[tri.n[2]]) / 3.0;
        const double kappa = mit->second.kappa.eval(tc);
        const double cv = mit->second.c_v.eval(tc);
        const double q = source.q(tri.region_tag);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                kb.add(tri.n[i], tri.n[j], kappa * el.area * el.grad[i].dot(el.grad[j]));
                mb.add(tri.n[i], tri.n[j], cv * el.area / 12.0 * (i == j ? 2.0 : 1.0));
            }
            out.f[tri.n[i]] += q * el.area / 3.0;
        }
    }
    out.K = kb.finalize();
    out.M = mb.finalize();
}

/// Robin terms: boundary mass scaled by h and the h*T_ref load.
inline void assemble_robin(const Mesh& mesh, const std::vector<BoundaryCondition>& bcs,
                           SystemBlocks& out) {
    const int n = static_cast<int>(mesh.nodes.size());
    SparseBuilder rb(n, n);
    out.r = Vector::Zero(n);
    for (const auto& bc : bcs) {
        if (bc.kind != BoundaryCondition::Kind::robin) continue;
        if (!std::isfinite(bc.h) || !std::isfinite(bc.t_ref))
            throw Error("non-finite Robin parameters");
        bool found = false;
        for (const auto& e : mesh.boundary_edges) {
            if (e.curve_tag != bc.curve_tag) continue;
            found = true;
            const Node& a = mesh.nodes[e.n[0]];
            const Node& b = mesh.nodes[e.n[1]];
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            const double m = bc.h * len / 6.0;
            rb.add(e.n[0], e.n[0], 2.0 * m);
            rb.add(e.n[0], e.n[1], m);
            rb.add(e.n[1], e.n[0], m);
            rb.add(e.n[1], e.n[1], 2.0 * m);
            out.r[e.n[0]] += bc.h * bc.t_ref * len / 2.0;
            out.r[e.n[1]] += bc.h * bc.t_ref * len / 2.0;
        }
        if (!found)
            throw Error("Robin curve tag " + std::to_string(bc.curve_tag) + " has no edges");
    }
    out.R = rb.finalize();
}

inline SystemBlocks assemble_blocks(const Mesh& mesh, const std::map<int, Material>& materials,
                                    const SourceSpec& source,
                                    const std::vector<BoundaryCondition>& bcs,
                                    const Vector& t_star) {
    check_bcs(bcs);
    SystemBlocks out;
    assemble_volume(mesh, materials, source, t_star, out);
    assemble_robin(mesh, bcs, out);
    return out;
}

/// Per-DoF prescribed values, built either from boundary conditions or
/// directly (tests, patch problems with spatially varying data).
struct DirichletValues {
    std::map<int, double> values;

    void set(int dof, double value) {
        auto [it, inserted] = values.emplace(dof, value);
        if (!inserted && std::abs(it->second - value) > 1e-12)
            throw Error("conflicting Dirichlet values at dof " + std::to_string(dof));
    }
    bool constrained(int dof) const { return values.count(dof) != 0; }
};

inline DirichletValues dirichlet_from_bcs(const Mesh& mesh,
                                          const std::vector<BoundaryCondition>& bcs) {
    DirichletValues d;
    for (const auto& bc : bcs) {
        if (bc.kind != BoundaryCondition::Kind::dirichlet) continue;
        for (const auto& e : mesh.boundary_edges)
            if (e.curve_tag == bc.curve_tag) {
                d.set(e.n[0], bc.g);
                d.set(e.n[1], bc.g);
            }
    }
    return d;
}

/// Symmetric elimination of constrained DoFs. Keeps the index maps needed
/// to reconstruct the full solution vector.
struct ReducedSystem {
    SparseMat A;
    Vector b;
    std::vector<int> full_to_red;  // -1 for constrained dofs
    std::vector<int> red_to_full;
    Vector lift;  // full-size; prescribed values at constrained dofs, 0 elsewhere

    Vector reconstruct(const Vector& x_red) const {
        Vector full = lift;
        for (std::size_t i = 0; i < red_to_full.size(); ++i) full[red_to_full[i]] = x_red[i];
        return full;
    }
};

inline ReducedSystem apply_dirichlet(const SparseMat& a, const Vector& b,
                                     const DirichletValues& dirichlet) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || b.size() != n) throw Error("apply_dirichlet: dimension mismatch");
    ReducedSystem red;
    red.full_to_red.assign(n, -1);
    red.lift = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        auto it = dirichlet.values.find(i);
        if (it != dirichlet.values.end()) {
            red.lift[i] = it->second;
        } else {
            red.full_to_red[i] = static_cast<int>(red.red_to_full.size());
            red.red_to_full.push_back(i);
        }
    }
    const int m = static_cast<int>(red.red_to_full.size());
    SparseBuilder ab(m, m);
    red.b = Vector::Zero(m);
    for (int i = 0; i < m; ++i) red.b[i] = b[red.red_to_full[i]];
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMat::InnerIterator it(a, col); it; ++it) {
            const int ri = red.full_to_red[static_cast<int>(it.row())];
            const int ci = red.full_to_red[col];
            if (ri >= 0 && ci >= 0)
                ab.add(ri, ci, it.value());
            else if (ri >= 0 && ci < 0)
                red.b[ri] -= it.value() * red.lift[col];
        }
    }
    red.A = ab.finalize();
    return red;
}

}  // namespace mtsa

#endif
