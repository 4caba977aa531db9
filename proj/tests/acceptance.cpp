// Acceptance suite: one criterion per number, one [PASS]/[FAIL] line each.
// Run without arguments for all criteria or with a number for one of them.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <thread>

#include "mtsa/runner.hpp"

using namespace mtsa;

namespace {

const std::string kMagnetConfig = std::string(MTSA_SOURCE_DIR) + "/examples/magnet.toml";

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
    void note(const std::string& what) {
        if (ok) detail = what;
    }
};

// ---------------------------------------------------------------------------
// 1. Conformal equivalence: mortar multipliers vs strong coupling.

Check criterion_1() {
    constexpr double kTol = 1e-10;
    Check c;
    TwoBlockSpec spec;
    auto make_problem = [&](bool eliminate) {
        Problem p;
        p.mesh = generate_two_block(spec, MeshMode::mortar_tsa, 2.5e-4, 2.5e-4);
        p.materials[p.mesh.tag("left_block")] = Material::constant(50.0, 1e4);
        p.materials[p.mesh.tag("right_block")] = Material::constant(50.0, 1e4);
        p.source.q_by_region[p.mesh.tag("left_block")] = 1e5;
        p.bcs.push_back({BoundaryCondition::Kind::dirichlet, p.mesh.tag("exterior"), 4.2, 0, 0});
        TsaInterfaceConfig ic;
        ic.stack = TsaStack::uniform(3, spec.insulation, Material::constant(0.05, 500.0));
        ic.eliminate_side1 = eliminate;
        ic.eliminate_side2 = eliminate;
        p.tsa["insulation"] = ic;
        return p;
    };

    Problem mortar = make_problem(false);
    Problem strong = make_problem(true);
    DofMap dm_m = build_dofmap(mortar);
    DofMap dm_s = build_dofmap(strong);
    TransientConfig cfg;
    Vector xm = solve_steady(mortar, dm_m, cfg).x;
    Vector xs = solve_steady(strong, dm_s, cfg).x;

    double worst = 0.0;
    for (int i = 0; i < dm_m.n_volume; ++i)
        worst = std::max(worst, std::abs(xm[i] - xs[i]) / std::max(std::abs(xs[i]), 1e-30));
    const InterfaceDofs& fm = dm_m.ifaces[0];
    const InterfaceDofs& fs = dm_s.ifaces[0];
    for (int j = 0; j <= fm.n_layers; ++j)
        for (int i = 0; i < fm.m; ++i) {
            const double a = xm[fm.sheet_dof(j, i)];
            const double b = xs[fs.sheet_dof(j, i)];
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-30));
        }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max nodal relative difference %.3e (tol %.0e)", worst, kTol);
    c.require(worst < kTol, buf);
    c.note(buf);
    return c;
}

// ---------------------------------------------------------------------------
// 2. Composite-slab series resistance, N = 3 distinct conductivities.

Check criterion_2() {
    constexpr double kTol = 1e-10;
    Check c;
    TraceMesh tr;
    tr.side = TraceSide::virtual_interface;
    tr.node_ids = {-1, -1};
    tr.s = {0.0, 1e-2};
    tr.xy = {{0.0, 0.0}, {0.0, 1e-2}};

    TsaStack stack;
    stack.breakpoints = {0.0, 1e-4, 3e-4, 6e-4};
    stack.layer_material = {Material::constant(0.013, 1.0), Material::constant(0.057, 1.0),
                            Material::constant(0.21, 1.0)};
    stack.layer_q = {0.0, 0.0, 0.0};

    Eigen::MatrixXd t_star = Eigen::MatrixXd::Constant(4, 2, 4.2);
    TsaOperator op = assemble_tsa(tr, stack, t_star);

    const double tl = 12.0, trv = 4.0;
    DirichletValues d;
    d.set(0, tl);
    d.set(1, tl);
    d.set(6, trv);
    d.set(7, trv);
    ReducedSystem red = apply_dirichlet(op.a, Vector::Zero(8), d);
    Vector x = red.reconstruct(solve_saddle(red.A, red.b));

    // Independent closed form: series thermal resistances R_k = d_k/kappa_k.
    const double r1 = 1e-4 / 0.013, r2 = 2e-4 / 0.057, r3 = 3e-4 / 0.21;
    const double rt = r1 + r2 + r3;
    const double t1 = tl + (trv - tl) * r1 / rt;
    const double t2 = tl + (trv - tl) * (r1 + r2) / rt;
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        worst = std::max(worst, std::abs(x[2 + i] - t1) / std::abs(t1));
        worst = std::max(worst, std::abs(x[4 + i] - t2) / std::abs(t2));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max sheet relative error %.3e (tol %.0e)", worst, kTol);
    c.require(worst < kTol, buf);
    c.note(buf);
    return c;
}

// ---------------------------------------------------------------------------
// 3. Patch test: linear field across a non-conforming mortar interface.

Check criterion_3() {
    constexpr double kTol = 1e-10;
    Check c;
    TwoBlockSpec spec;
    Problem p;
    p.mesh = generate_two_block(spec, MeshMode::mortar_tsa, 2.5e-4, 1e-4);  // ratio 2.5:1
    const double kappa = 2.0;
    p.materials[p.mesh.tag("left_block")] = Material::constant(kappa, 1.0);
    p.materials[p.mesh.tag("right_block")] = Material::constant(kappa, 1.0);
    TsaInterfaceConfig ic;
    ic.stack = TsaStack::uniform(3, spec.insulation, Material::constant(kappa, 1.0));
    p.tsa["insulation"] = ic;

    const double a = 4.0, b = 100.0;
    auto field = [&](double x) { return a + b * x; };
    for (const auto& e : p.mesh.boundary_edges) {
        if (e.curve_tag != p.mesh.tag("exterior")) continue;
        p.extra_dirichlet.set(e.n[0], field(p.mesh.nodes[e.n[0]].x));
        p.extra_dirichlet.set(e.n[1], field(p.mesh.nodes[e.n[1]].x));
    }
    DofMap dm = build_dofmap(p);
    TransientConfig cfg;
    Vector x = solve_steady(p, dm, cfg).x;

    double worst = 0.0;
    for (const auto& n : p.mesh.nodes) {
        const double want = field(n.x);
        worst = std::max(worst, std::abs(x[n.id] - want) / std::abs(want));
    }
    const InterfaceDofs& f = dm.ifaces[0];
    const double x1 = spec.width_left;
    for (int j = 0; j <= f.n_layers; ++j) {
        const double want = field(x1 + f.cfg->stack.breakpoints[j]);
        for (int i = 0; i < f.m; ++i) {
            const double got = x[f.sheet_dof(j, i)];
            worst = std::max(worst, std::abs(got - want) / std::abs(want));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max relative deviation from the linear field %.3e (tol %.0e)", worst, kTol);
    c.require(worst < kTol, buf);
    c.note(buf);
    return c;
}

// ---------------------------------------------------------------------------
// 4. Magnet verification study: both modes, monotone T_max, mode agreement,
//    near-isothermal cables.

Check criterion_4() {
    constexpr double kTmaxTol = 2e-3;
    constexpr double kCableFraction = 0.1;
    constexpr double kBudgetSeconds = 120.0;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    ProblemConfig cfg = load_problem_config(
        kMagnetConfig, {"regions.2.q=1e5", "regions.3.q=1e5", "tsa.0.layers=3",
                        "solver.dt=0.01", "solver.t_end=2.0"});
    RunResult mor, ref;
    std::exception_ptr err_m, err_r;
    std::thread tm([&] {
        try {
            mor = run_case(cfg, MeshMode::mortar_tsa);
        } catch (...) {
            err_m = std::current_exception();
        }
    });
    try {
        ref = run_case(cfg, MeshMode::reference);
    } catch (...) {
        err_r = std::current_exception();
    }
    tm.join();
    if (err_m) std::rethrow_exception(err_m);
    if (err_r) std::rethrow_exception(err_r);

    // (a) monotone rise toward a plateau.
    const int col = mor.ts.column("T_max_right_cable");
    double max_step = 0.0;
    for (std::size_t i = 1; i < mor.ts.rows.size(); ++i) {
        const double inc = mor.ts.rows[i][col] - mor.ts.rows[i - 1][col];
        c.require(inc >= -1e-12, "T_max(right cable) not monotone at step " + std::to_string(i));
        max_step = std::max(max_step, inc);
    }
    const double last_step =
        mor.ts.rows.back()[col] - mor.ts.rows[mor.ts.rows.size() - 2][col];
    c.require(last_step <= 0.05 * max_step, "T_max did not approach a plateau");

    // (b) pointwise mode-vs-mode relative error of T_max(t).
    double worst_ts = 0.0;
    for (const std::string& q : {std::string("T_max_right_cable"), std::string("T_max_left_cable")}) {
        TimeSeries err = relative_error(mor.ts, ref.ts, q);
        for (const auto& row : err.rows) worst_ts = std::max(worst_ts, row[0]);
    }
    c.require(worst_ts < kTmaxTol, "T_max relative error " + std::to_string(worst_ts));

    // (c) control line at t = 2 s: cable variation vs insulation drop.
    auto profile_of = [&](RunResult& r) {
        const Mesh& mesh = r.problem.mesh;
        double lo = mesh.nodes.front().x, hi = lo;
        for (const auto& n : mesh.nodes) {
            lo = std::min(lo, n.x);
            hi = std::max(hi, n.x);
        }
        return sample_line(r.states.back().x, mesh, r.dm, cfg.output.control_line_y,
                           cfg.output.profile_samples, lo, hi);
    };
    auto span_in = [](const LineProfile& prof, int tag) {
        double lo = 1e300, hi = -1e300;
        for (const auto& s : prof.samples)
            if (s.side == "volume" && s.region_tag == tag) {
                lo = std::min(lo, s.temperature);
                hi = std::max(hi, s.temperature);
            }
        return hi - lo;
    };
    for (RunResult* r : {&mor, &ref}) {
        const LineProfile prof = profile_of(*r);
        const Mesh& mesh = r->problem.mesh;
        double drop;
        if (mesh.has_tag("insulation")) {
            double lo = 1e300, hi = -1e300;
            for (const auto& s : prof.samples)
                if (s.side == "volume" && s.region_tag == mesh.tag("insulation")) {
                    lo = std::min(lo, s.temperature);
                    hi = std::max(hi, s.temperature);
                }
            drop = hi - lo;
        } else {
            double t1 = 0.0, t2 = 0.0;
            for (const auto& s : prof.samples) {
                if (s.side == "side1") t1 = s.temperature;
                if (s.side == "side2") t2 = s.temperature;
            }
            drop = std::abs(t1 - t2);
        }
        c.require(drop > 0.0, "no temperature drop across the insulation");
        for (const char* cable : {"left_cable", "right_cable"}) {
            const double var = span_in(prof, mesh.tag(cable));
            c.require(var < kCableFraction * drop,
                      std::string(cable) + " variation " + std::to_string(var) +
                          " vs insulation drop " + std::to_string(drop));
        }
    }

    const double elapsed = seconds_since(t0);
    c.require(elapsed < kBudgetSeconds, "runtime " + std::to_string(elapsed) + " s");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "T_max mode error %.3e (tol %.0e), runtime %.1f s", worst_ts, kTmaxTol, elapsed);
    c.note(buf);
    return c;
}

// ---------------------------------------------------------------------------
// 5. Mortar integration exactness against a 64-point Gauss oracle.

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

Check criterion_5() {
    constexpr double kTol = 1e-14;
    Check c;
    std::vector<double> gx, gw;
    gauss_legendre(64, gx, gw);
    std::mt19937 rng(42);

    auto random_trace = [&rng](double length, bool reversed) {
        std::uniform_int_distribution<int> nd(2, 9);
        std::uniform_real_distribution<double> u(0.2, 1.0);
        const int n = nd(rng);
        std::vector<double> parts(n);
        double acc = 0.0;
        for (auto& p : parts) acc += (p = u(rng));
        TraceMesh tr;
        tr.side = TraceSide::virtual_interface;
        double s = 0.0;
        tr.node_ids.push_back(-1);
        tr.s.push_back(0.0);
        tr.xy.push_back({0.0, reversed ? length : 0.0});
        for (int i = 0; i < n; ++i) {
            s = (i == n - 1) ? length : s + parts[i] / acc * length;
            tr.node_ids.push_back(-1);
            tr.s.push_back(s);
            tr.xy.push_back({0.0, reversed ? length - s : s});
        }
        return tr;
    };

    // Entries over sliver overlaps (cut separation delta -> 0) have condition
    // number ~ length/delta, so an entrywise relative tolerance requires the
    // two partitions to stay separated; resample until all cuts are at least
    // 5% of the trace length apart.
    auto well_separated = [](const TraceMesh& lam, const TraceMesh& side, bool rev,
                             double length) {
        for (std::size_t i = 1; i + 1 < lam.s.size(); ++i)
            for (std::size_t j = 1; j + 1 < side.s.size(); ++j) {
                const double sb = rev ? length - side.s[j] : side.s[j];
                if (std::abs(lam.s[i] - sb) < 0.05 * length) return false;
            }
        return true;
    };

    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double length = std::uniform_real_distribution<double>(0.3, 2.5)(rng);
        const bool rev = trial % 2 == 1;
        TraceMesh lam = random_trace(length, false);
        TraceMesh side = random_trace(length, rev);
        while (!well_separated(lam, side, rev, length)) side = random_trace(length, rev);
        SparseMat d = coupling_matrix(lam, side);

        std::vector<double> cuts = lam.s;
        for (double v : side.s) cuts.push_back(rev ? length - v : v);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                   cuts.end());
        const int nl = static_cast<int>(lam.size());
        const int ns = static_cast<int>(side.size());
        Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(nl, ns);
        for (std::size_t e = 0; e + 1 < cuts.size(); ++e) {
            const double a = cuts[e], b = cuts[e + 1];
            for (int g = 0; g < 64; ++g) {
                const double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[g];
                const double w = 0.5 * (b - a) * gw[g];
                const double sb = rev ? length - s : s;
                for (int i = 0; i < nl; ++i)
                    for (int j = 0; j < ns; ++j)
                        oracle(i, j) += w * p1_basis(lam.s, i, s) * p1_basis(side.s, j, sb);
            }
        }
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < ns; ++j) {
                const double want = oracle(i, j);
                const double got = d.coeff(i, j);
                if (std::abs(want) < 1e-18) continue;
                worst = std::max(worst, std::abs(got - want) / std::abs(want));
            }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max entrywise relative error %.3e (tol %.0e)", worst, kTol);
    c.require(worst < kTol, buf);
    c.note(buf);
    return c;
}

// ---------------------------------------------------------------------------
// 6. Discrete energy balance for the linear magnet variant.

std::vector<std::string> linear_material_overrides() {
    return {"regions.0.material=\"constant(0.3,7000)\"",
            "regions.1.material=\"constant(0.011,55)\"",
            "regions.2.material=\"constant(600,500)\"",
            "regions.3.material=\"constant(600,500)\"",
            "regions.4.material=\"constant(0.011,55)\"",
            "tsa.0.material=\"constant(0.011,55)\""};
}

Check criterion_6() {
    constexpr double kTol = 1e-10;
    constexpr double kBudgetSeconds = 60.0;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    auto overrides = linear_material_overrides();
    overrides.push_back("solver.dt=0.01");
    overrides.push_back("solver.t_end=2.0");
    ProblemConfig cfg = load_problem_config(kMagnetConfig, overrides);
    Problem p = build_problem(cfg, MeshMode::mortar_tsa);
    DofMap dm = build_dofmap(p);
    auto states = run_transient(p, dm, cfg.solver);

    double worst = 0.0;
    for (std::size_t i = 1; i < states.size(); ++i)
        worst = std::max(worst, energy_balance(p, dm, states[i - 1], states[i], cfg.solver.dt));
    const double elapsed = seconds_since(t0);
    c.require(worst < kTol, "max per-step residual " + std::to_string(worst));
    c.require(elapsed < kBudgetSeconds, "runtime " + std::to_string(elapsed) + " s");
    char buf[160];
    std::snprintf(buf, sizeof buf, "max per-step energy residual %.3e (tol %.0e), runtime %.1f s",
                  worst, kTol, elapsed);
    c.note(buf);
    return c;
}

// ---------------------------------------------------------------------------
// 7. First-order convergence in dt against a dt/8 reference.

Check criterion_7() {
    constexpr double kRatio = 1.8;
    constexpr double kBudgetSeconds = 120.0;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const double t_end = 0.32;
    auto run_with_dt = [&](double dt) {
        auto overrides = linear_material_overrides();
        char buf[64];
        std::snprintf(buf, sizeof buf, "solver.dt=%.17g", dt);
        overrides.push_back(buf);
        std::snprintf(buf, sizeof buf, "solver.t_end=%.17g", t_end);
        overrides.push_back(buf);
        ProblemConfig cfg = load_problem_config(kMagnetConfig, overrides);
        Problem p = build_problem(cfg, MeshMode::mortar_tsa);
        DofMap dm = build_dofmap(p);
        return run_transient(p, dm, cfg.solver).back().x;
    };
    const double dt0 = 0.04;
    const Vector ref = run_with_dt(dt0 / 8.0);
    auto err_at = [&](double dt) {
        const Vector x = run_with_dt(dt);
        double e = 0.0;
        for (int i = 0; i < ref.size(); ++i) e = std::max(e, std::abs(x[i] - ref[i]));
        return e;
    };
    const double e0 = err_at(dt0);
    const double e1 = err_at(dt0 / 2.0);
    const double e2 = err_at(dt0 / 4.0);
    const double elapsed = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "errors %.3e / %.3e / %.3e, ratios %.2f and %.2f (need >= %.1f), runtime %.1f s",
                  e0, e1, e2, e0 / e1, e1 / e2, kRatio, elapsed);
    c.require(e0 / e1 >= kRatio && e1 / e2 >= kRatio, buf);
    c.require(elapsed < kBudgetSeconds, "runtime " + std::to_string(elapsed) + " s");
    c.note(buf);
    return c;
}

// ---------------------------------------------------------------------------
// 8. Determinism: bit-identical CSV outputs across identical runs.

Check criterion_8() {
    Check c;
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "mtsa_acceptance_determinism";
    fs::remove_all(base);
    auto read_bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    ProblemConfig cfg = load_problem_config(kMagnetConfig, {"solver.t_end=0.5"});
    run_and_write(cfg, MeshMode::mortar_tsa, (base / "a").string());
    run_and_write(cfg, MeshMode::mortar_tsa, (base / "b").string());
    for (const char* name : {"timeseries.csv", "profile_0.csv"}) {
        const std::string a = read_bytes(base / "a" / name);
        const std::string b = read_bytes(base / "b" / name);
        c.require(!a.empty(), std::string(name) + " missing");
        c.require(a == b, std::string(name) + " differs between identical runs");
    }
    c.note("timeseries and profile CSV outputs are bit identical");
    fs::remove_all(base);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    const int which = argc > 1 ? std::atoi(argv[1]) : 0;
    struct Entry {
        int num;
        const char* name;
        Check (*fn)();
    };
    const Entry entries[] = {
        {1, "conformal equivalence of mortar and strong coupling", criterion_1},
        {2, "composite-slab series resistance oracle", criterion_2},
        {3, "patch test across a non-conforming interface", criterion_3},
        {4, "magnet verification study in both modes", criterion_4},
        {5, "mortar integration exactness", criterion_5},
        {6, "discrete energy balance", criterion_6},
        {7, "first-order convergence in dt", criterion_7},
        {8, "bit-identical CSV determinism", criterion_8},
    };
    bool all_ok = true;
    for (const Entry& e : entries) {
        if (which != 0 && e.num != which) continue;
        Check c;
        try {
            c = e.fn();
        } catch (const std::exception& ex) {
            c.ok = false;
            c.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] criterion %d: %s -- %s\n", c.ok ? "PASS" : "FAIL", e.num, e.name,
                    c.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : 1;
}
