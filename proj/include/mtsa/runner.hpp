#ifndef MTSA_RUNNER_HPP
#define MTSA_RUNNER_HPP

#include <chrono>
#include <filesystem>

#include <json.hpp>

#include "mtsa/config.hpp"
#include "mtsa/postproc.hpp"
#include "mtsa/solver.hpp"

namespace mtsa {

// ---------------------------------------------------------------------------
// Configuration schema

struct RegionSpec {
    std::string name;
    std::string material;
    double q = 0.0;
};

struct BoundarySpec {
    std::string curve;
    std::string kind;  // dirichlet | adiabatic | robin
    double g = 0.0;
    double h = 0.0;
    double t_ref = 0.0;
};

struct TsaSpec {
    std::string interface_name;
    int layers = 1;
    std::vector<double> thicknesses;  // optional; uniform split if empty
    std::string material;
    double q = 0.0;
    bool heat_capacity = true;
    bool eliminate_side1 = false;
    bool eliminate_side2 = false;
};

struct GeometryConfig {
    std::string kind = "magnet";  // magnet | two_block | rectangle
    GeometrySpec magnet;
    TwoBlockSpec two_block;
    double rect_width = 1.0;
    double rect_height = 1.0;
    double h_coarse = 2.5e-4;
    double h_fine = 1e-4;
};

struct OutputConfig {
    std::string directory = "out";
    double control_line_y = 0.0;
    int profile_samples = 400;
    std::vector<double> profile_times;
    std::vector<double> vtk_times;
    std::vector<std::string> timeseries_regions;
};

struct ProblemConfig {
    std::string mode = "mortar_tsa";
    GeometryConfig geometry;
    std::map<std::string, Material> user_materials;
    std::vector<RegionSpec> regions;
    std::vector<BoundarySpec> boundaries;
    std::vector<TsaSpec> tsa;
    TransientConfig solver;
    OutputConfig output;
    toml::Document doc;  // canonical source, used for hashing
};

inline MeshMode parse_mode(const std::string& mode) {
    if (mode == "reference") return MeshMode::reference;
    if (mode == "mortar_tsa") return MeshMode::mortar_tsa;
    throw Error("unknown mode '" + mode + "' (expected reference or mortar_tsa)");
}

inline ProblemConfig parse_problem_config(toml::Document doc) {
    ProblemConfig cfg;
    cfg.mode = toml::get_string(doc.root, "", "mode", cfg.mode);
    parse_mode(cfg.mode);

    auto tbl = [&doc](const std::string& name) -> const toml::Table& {
        static const toml::Table empty;
        auto it = doc.tables.find(name);
        return it == doc.tables.end() ? empty : it->second;
    };

    {
        const toml::Table& g = tbl("geometry");
        GeometryConfig& gc = cfg.geometry;
        gc.kind = toml::get_string(g, "geometry", "kind", gc.kind);
        gc.h_coarse = toml::get_number(g, "geometry", "h_coarse", gc.h_coarse);
        gc.h_fine = toml::get_number(g, "geometry", "h_fine", gc.h_fine);
        if (gc.kind == "magnet") {
            GeometrySpec& m = gc.magnet;
            m.cable_width = toml::get_number(g, "geometry", "cable_width", m.cable_width);
            m.cable_height = toml::get_number(g, "geometry", "cable_height", m.cable_height);
            m.insulation = toml::get_number(g, "geometry", "insulation", m.insulation);
            m.gap_height = toml::get_number(g, "geometry", "gap_height", m.gap_height);
            m.collar_height = toml::get_number(g, "geometry", "collar_height", m.collar_height);
        } else if (gc.kind == "two_block") {
            TwoBlockSpec& b = gc.two_block;
            b.width_left = toml::get_number(g, "geometry", "width_left", b.width_left);
            b.width_right = toml::get_number(g, "geometry", "width_right", b.width_right);
            b.height = toml::get_number(g, "geometry", "height", b.height);
            b.insulation = toml::get_number(g, "geometry", "insulation", b.insulation);
        } else if (gc.kind == "rectangle") {
            gc.rect_width = toml::get_number(g, "geometry", "width", gc.rect_width);
            gc.rect_height = toml::get_number(g, "geometry", "height", gc.rect_height);
        } else {
            throw Error("config key geometry.kind has unknown value '" + gc.kind + "'");
        }
    }

    if (auto it = doc.arrays.find("materials"); it != doc.arrays.end()) {
        for (const toml::Table& m : it->second) {
            const std::string name = toml::require_string(m, "materials", "name");
            const auto t = toml::get_numbers(m, "materials", "t");
            const auto k = toml::get_numbers(m, "materials", "kappa");
            const auto c = toml::get_numbers(m, "materials", "cv");
            if (t.empty() || t.size() != k.size() || t.size() != c.size())
                throw Error("config material '" + name + "' needs equal-length t/kappa/cv arrays");
            Material mat;
            mat.name = name;
            mat.kappa = PropertyCurve(t, k);
            mat.c_v = PropertyCurve(t, c);
            cfg.user_materials[name] = std::move(mat);
        }
    }

    if (auto it = doc.arrays.find("regions"); it != doc.arrays.end()) {
        for (const toml::Table& r : it->second) {
            RegionSpec rs;
            rs.name = toml::require_string(r, "regions", "name");
            rs.material = toml::require_string(r, "regions", "material");
            rs.q = toml::get_number(r, "regions", "q", 0.0);
            cfg.regions.push_back(std::move(rs));
        }
    }
    if (cfg.regions.empty()) throw Error("missing config section [[regions]]");

    if (auto it = doc.arrays.find("boundaries"); it != doc.arrays.end()) {
        for (const toml::Table& b : it->second) {
            BoundarySpec bs;
            bs.curve = toml::require_string(b, "boundaries", "curve");
            bs.kind = toml::require_string(b, "boundaries", "kind");
            if (bs.kind == "dirichlet") {
                bs.g = toml::require_number(b, "boundaries", "g");
            } else if (bs.kind == "robin") {
                bs.h = toml::require_number(b, "boundaries", "h");
                bs.t_ref = toml::require_number(b, "boundaries", "t_ref");
            } else if (bs.kind != "adiabatic") {
                throw Error("config key boundaries.kind has unknown value '" + bs.kind + "'");
            }
            cfg.boundaries.push_back(std::move(bs));
        }
    }

    if (auto it = doc.arrays.find("tsa"); it != doc.arrays.end()) {
        for (const toml::Table& t : it->second) {
            TsaSpec ts;
            ts.interface_name = toml::get_string(t, "tsa", "interface", "insulation");
            ts.layers = static_cast<int>(toml::get_number(t, "tsa", "layers", 1));
            if (ts.layers < 1) throw Error("config key tsa.layers must be at least 1");
            ts.thicknesses = toml::get_numbers(t, "tsa", "thicknesses");
            ts.material = toml::require_string(t, "tsa", "material");
            ts.q = toml::get_number(t, "tsa", "q", 0.0);
            ts.heat_capacity = toml::get_bool(t, "tsa", "heat_capacity", true);
            ts.eliminate_side1 = toml::get_bool(t, "tsa", "eliminate_side1", false);
            ts.eliminate_side2 = toml::get_bool(t, "tsa", "eliminate_side2", false);
            cfg.tsa.push_back(std::move(ts));
        }
    }

    {
        const toml::Table& s = tbl("solver");
        cfg.solver.dt = toml::get_number(s, "solver", "dt", cfg.solver.dt);
        cfg.solver.t_end = toml::get_number(s, "solver", "t_end", cfg.solver.t_end);
        cfg.solver.picard_tol = toml::get_number(s, "solver", "picard_tol", cfg.solver.picard_tol);
        cfg.solver.picard_max_iters = static_cast<int>(
            toml::get_number(s, "solver", "picard_max_iters", cfg.solver.picard_max_iters));
        cfg.solver.t0 = toml::get_number(s, "solver", "t0", cfg.solver.t0);
        cfg.solver.early_exit = toml::get_bool(s, "solver", "early_exit", cfg.solver.early_exit);
        cfg.solver.check();
    }

    {
        const toml::Table& o = tbl("output");
        cfg.output.directory = toml::get_string(o, "output", "directory", cfg.output.directory);
        cfg.output.control_line_y =
            toml::get_number(o, "output", "control_line_y", cfg.output.control_line_y);
        cfg.output.profile_samples = static_cast<int>(
            toml::get_number(o, "output", "profile_samples", cfg.output.profile_samples));
        cfg.output.profile_times = toml::get_numbers(o, "output", "profile_times");
        cfg.output.vtk_times = toml::get_numbers(o, "output", "vtk_times");
        cfg.output.timeseries_regions = toml::get_strings(o, "output", "timeseries_regions");
    }

    cfg.doc = std::move(doc);
    return cfg;
}

inline ProblemConfig load_problem_config(const std::string& path,
                                         const std::vector<std::string>& overrides = {}) {
    toml::Document doc = toml::parse_file(path);
    for (const auto& ov : overrides) toml::apply_override(doc, ov);
    return parse_problem_config(std::move(doc));
}

// ---------------------------------------------------------------------------
// Problem construction

inline Mesh build_mesh(const ProblemConfig& cfg, MeshMode mode) {
    const GeometryConfig& g = cfg.geometry;
    if (g.kind == "magnet")
        return generate_magnet_geometry(g.magnet, mode, g.h_coarse, g.h_fine);
    if (g.kind == "two_block") return generate_two_block(g.two_block, mode, g.h_coarse, g.h_fine);
    return generate_rectangle(g.rect_width, g.rect_height, g.h_fine);
}

inline Material resolve_material(const ProblemConfig& cfg, const std::string& name) {
    auto it = cfg.user_materials.find(name);
    if (it != cfg.user_materials.end()) return it->second;
    return preset(name);
}

/// Region and boundary names that only exist in one mode (meshed insulation,
/// interface curves) are skipped silently in the other.
inline bool mode_dependent_name(const std::string& name) {
    return name == "insulation" || name == "gamma1" || name == "gamma2";
}

inline Problem build_problem(const ProblemConfig& cfg, MeshMode mode) {
    Problem p;
    p.mesh = build_mesh(cfg, mode);
    {
        ValidationReport rep = validate(p.mesh);
        if (!rep.ok()) throw Error("generated mesh invalid: " + rep.entries.front());
    }

    for (const auto& rs : cfg.regions) {
        if (!p.mesh.has_tag(rs.name)) {
            if (mode_dependent_name(rs.name)) continue;
            throw Error("config region '" + rs.name + "' is not a mesh region");
        }
        const int tag = p.mesh.tag(rs.name);
        p.materials[tag] = resolve_material(cfg, rs.material);
        if (rs.q != 0.0) p.source.q_by_region[tag] = rs.q;
    }
    for (const auto& t : p.mesh.triangles)
        if (!p.materials.count(t.region_tag))
            throw Error("region '" + p.mesh.name_of(t.region_tag) +
                        "' has no material in [[regions]]");

    for (const auto& bs : cfg.boundaries) {
        if (!p.mesh.has_tag(bs.curve)) {
            if (mode_dependent_name(bs.curve)) continue;
            throw Error("config boundary curve '" + bs.curve + "' is not a mesh curve");
        }
        BoundaryCondition bc;
        bc.curve_tag = p.mesh.tag(bs.curve);
        if (bs.kind == "dirichlet") {
            bc.kind = BoundaryCondition::Kind::dirichlet;
            bc.g = bs.g;
        } else if (bs.kind == "robin") {
            bc.kind = BoundaryCondition::Kind::robin;
            bc.h = bs.h;
            bc.t_ref = bs.t_ref;
        } else {
            bc.kind = BoundaryCondition::Kind::neumann_adiabatic;
        }
        p.bcs.push_back(bc);
    }

    if (mode == MeshMode::mortar_tsa) {
        for (const auto& ts : cfg.tsa) {
            auto thick_it = p.mesh.interface_thickness.find(ts.interface_name);
            if (thick_it == p.mesh.interface_thickness.end())
                throw Error("config tsa interface '" + ts.interface_name +
                            "' is not a collapsed interface");
            const double d = thick_it->second;
            const Material mat = resolve_material(cfg, ts.material);
            TsaInterfaceConfig ic;
            if (ts.thicknesses.empty()) {
                ic.stack = TsaStack::uniform(ts.layers, d, mat, ts.q);
            } else {
                if (static_cast<int>(ts.thicknesses.size()) != ts.layers)
                    throw Error("config key tsa.thicknesses must list one entry per layer");
                double sum = 0.0;
                ic.stack.breakpoints.push_back(0.0);
                for (double dk : ts.thicknesses) {
                    if (dk <= 0.0) throw Error("config key tsa.thicknesses must be positive");
                    sum += dk;
                    ic.stack.breakpoints.push_back(sum);
                }
                if (std::abs(sum - d) > 1e-9 * d)
                    throw Error("config key tsa.thicknesses must sum to the layer thickness");
                ic.stack.breakpoints.back() = d;
                ic.stack.layer_material.assign(ts.layers, mat);
                ic.stack.layer_q.assign(ts.layers, ts.q);
            }
            ic.stack.include_heat_capacity = ts.heat_capacity;
            ic.eliminate_side1 = ts.eliminate_side1;
            ic.eliminate_side2 = ts.eliminate_side2;
            p.tsa[ts.interface_name] = std::move(ic);
        }
        for (const auto& ci : p.mesh.interfaces)
            if (!p.tsa.count(ci.name))
                throw Error("collapsed interface '" + ci.name + "' has no [[tsa]] entry");
    }
    return p;
}

// ---------------------------------------------------------------------------
// Run orchestration

struct RunResult {
    Problem problem;
    DofMap dm;
    std::vector<TransientState> states;
    TimeSeries ts;
};

inline RunResult run_case(const ProblemConfig& cfg, MeshMode mode) {
    RunResult res;
    res.problem = build_problem(cfg, mode);
    res.dm = build_dofmap(res.problem);
    res.states = run_transient(res.problem, res.dm, cfg.solver);

    std::vector<std::string> names = cfg.output.timeseries_regions;
    if (names.empty())
        for (const auto& rs : cfg.regions)
            if (res.problem.mesh.has_tag(rs.name)) names.push_back(rs.name);
    for (const auto& n : names) {
        if (!res.problem.mesh.has_tag(n))
            throw Error("config output region '" + n + "' is not a mesh region");
        res.ts.columns.push_back("T_max_" + n);
    }
    res.ts.columns.push_back("picard_iters");
    for (const auto& st : res.states) {
        std::vector<double> row;
        for (const auto& n : names)
            row.push_back(max_in_region(st.x, res.problem.mesh, res.problem.mesh.tag(n)));
        row.push_back(static_cast<double>(st.picard_iters));
        res.ts.append(st.time, std::move(row));
    }
    return res;
}

namespace detail {

/// Exclusive-creation lock file; removed on destruction.
class DirLock {
  public:
    explicit DirLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (std::filesystem::exists(path_))
            throw Error("output directory locked by another run: " + path_.string());
        std::ofstream out(path_);
        if (!out) throw Error("cannot create lock file: " + path_.string());
    }
    ~DirLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

  private:
    std::filesystem::path path_;
};

inline int nearest_state(const std::vector<TransientState>& states, double t) {
    int best = 0;
    for (std::size_t i = 1; i < states.size(); ++i)
        if (std::abs(states[i].time - t) < std::abs(states[best].time - t))
            best = static_cast<int>(i);
    return best;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail

/// Hash of the geometry-defining parts of the configuration; `compare`
/// refuses runs whose domains differ.
inline std::string geometry_hash(const ProblemConfig& cfg) {
    toml::Document g;
    if (auto it = cfg.doc.tables.find("geometry"); it != cfg.doc.tables.end())
        g.tables["geometry"] = it->second;
    return detail::hash_hex(toml::hash(g));
}

/// Runs one mode and writes time series, profiles, VTK fields and the
/// manifest into `out_dir`. Returns the in-memory result.
inline RunResult run_and_write(const ProblemConfig& cfg, MeshMode mode,
                               const std::string& out_dir) {
    const auto wall0 = std::chrono::steady_clock::now();
    const std::filesystem::path dir(out_dir);
    detail::DirLock lock(dir);

    RunResult res = run_case(cfg, mode);
    nlohmann::json manifest;
    manifest["version"] = "1.0.0";
    manifest["mode"] = (mode == MeshMode::reference) ? "reference" : "mortar_tsa";
    manifest["config_hash"] = detail::hash_hex(toml::hash(cfg.doc));
    manifest["geometry_hash"] = geometry_hash(cfg);
    std::vector<std::string> files;

    {
        std::ofstream out(dir / "timeseries.csv");
        if (!out) throw Error("cannot write timeseries.csv");
        write_timeseries_csv(res.ts, out);
        files.push_back("timeseries.csv");
    }

    const Mesh& mesh = res.problem.mesh;
    double x_min = mesh.nodes.front().x, x_max = x_min;
    for (const auto& n : mesh.nodes) {
        x_min = std::min(x_min, n.x);
        x_max = std::max(x_max, n.x);
    }
    nlohmann::json profile_index = nlohmann::json::array();
    for (std::size_t k = 0; k < cfg.output.profile_times.size(); ++k) {
        const int si = detail::nearest_state(res.states, cfg.output.profile_times[k]);
        LineProfile prof = sample_line(res.states[si].x, mesh, res.dm, cfg.output.control_line_y,
                                       cfg.output.profile_samples, x_min, x_max);
        const std::string name = "profile_" + std::to_string(k) + ".csv";
        std::ofstream out(dir / name);
        if (!out) throw Error("cannot write " + name);
        write_profile_csv(prof, out);
        files.push_back(name);
        profile_index.push_back({{"file", name}, {"time", res.states[si].time}});
    }
    manifest["profiles"] = profile_index;

    nlohmann::json field_index = nlohmann::json::array();
    for (std::size_t k = 0; k < cfg.output.vtk_times.size(); ++k) {
        const int si = detail::nearest_state(res.states, cfg.output.vtk_times[k]);
        const std::string name = "fields_" + std::to_string(k) + ".vtk";
        export_fields(res.states[si].x, mesh, res.dm, (dir / name).string());
        files.push_back(name);
        field_index.push_back({{"file", name}, {"time", res.states[si].time}});
    }
    manifest["fields"] = field_index;
    manifest["files"] = files;
    manifest["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    // Atomic manifest write marks the run complete.
    const auto tmp = dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write manifest");
        out << manifest.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, dir / "manifest.json");
    return res;
}

// ---------------------------------------------------------------------------
// Comparison

/// Max pointwise relative error between two profiles, evaluating b at a's
/// sample positions by linear interpolation over the shared x range.
inline double profile_max_rel_error(const LineProfile& a, const LineProfile& b) {
    if (a.samples.empty() || b.samples.empty()) throw Error("empty profile");
    // Identically sampled profiles (same run setup) are compared elementwise;
    // this keeps coincident sample positions (e.g. a side value and the first
    // sheet of a collapsed interface share one x) from aliasing each other.
    bool aligned = a.samples.size() == b.samples.size();
    for (std::size_t i = 0; aligned && i < a.samples.size(); ++i)
        aligned = a.samples[i].x == b.samples[i].x && a.samples[i].side == b.samples[i].side;
    if (aligned) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.samples.size(); ++i) {
            const double vb = b.samples[i].temperature;
            worst = std::max(worst, std::abs(a.samples[i].temperature - vb) /
                                        std::max(std::abs(vb), 1e-30));
        }
        return worst;
    }
    auto value_at = [](const LineProfile& p, double x) {
        std::size_t i = 1;
        while (i + 1 < p.samples.size() && p.samples[i].x < x) ++i;
        const auto& s0 = p.samples[i - 1];
        const auto& s1 = p.samples[i];
        if (s1.x <= s0.x) return 0.5 * (s0.temperature + s1.temperature);
        const double w = (x - s0.x) / (s1.x - s0.x);
        return (1.0 - w) * s0.temperature + w * s1.temperature;
    };
    const double lo = std::max(a.samples.front().x, b.samples.front().x);
    const double hi = std::min(a.samples.back().x, b.samples.back().x);
    if (hi <= lo) throw Error("profiles do not overlap");
    double worst = 0.0;
    for (const auto& s : a.samples) {
        if (s.x < lo || s.x > hi) continue;
        const double vb = value_at(b, s.x);
        worst = std::max(worst, std::abs(s.temperature - vb) / std::max(std::abs(vb), 1e-30));
    }
    return worst;
}

struct CompareReport {
    double max_timeseries_error = 0.0;
    std::vector<std::pair<std::string, double>> per_column;   // time series columns
    std::vector<std::pair<std::string, double>> per_profile;  // profile files
    double worst() const {
        double w = max_timeseries_error;
        for (const auto& [n, e] : per_profile) w = std::max(w, e);
        return w;
    }
};

/// Compares two completed run directories: per-column relative-error series
/// of the shared T_max columns plus control-line profile errors. Writes
/// errors.csv and summary.txt into `out_dir` if non-empty.
inline CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b,
                                  const std::string& out_dir) {
    namespace fs = std::filesystem;
    auto load_json = [](const fs::path& p) {
        std::ifstream in(p);
        if (!in) throw Error("missing manifest: " + p.string());
        return nlohmann::json::parse(in);
    };
    const nlohmann::json ma = load_json(fs::path(dir_a) / "manifest.json");
    const nlohmann::json mb = load_json(fs::path(dir_b) / "manifest.json");
    if (ma.at("geometry_hash") != mb.at("geometry_hash"))
        throw Error("incompatible runs: geometry hashes differ");

    auto load_ts = [](const fs::path& p) {
        std::ifstream in(p);
        if (!in) throw Error("missing time series: " + p.string());
        return read_timeseries_csv(in);
    };
    const TimeSeries ta = load_ts(fs::path(dir_a) / "timeseries.csv");
    const TimeSeries tb = load_ts(fs::path(dir_b) / "timeseries.csv");

    CompareReport rep;
    TimeSeries errors;
    for (const auto& col : ta.columns) {
        if (col == "picard_iters") continue;
        bool in_b = false;
        for (const auto& cb : tb.columns) in_b |= (cb == col);
        if (!in_b) continue;
        TimeSeries e = relative_error(ta, tb, col);
        double worst = 0.0;
        for (const auto& row : e.rows) worst = std::max(worst, row[0]);
        rep.per_column.push_back({col, worst});
        rep.max_timeseries_error = std::max(rep.max_timeseries_error, worst);
        if (errors.columns.empty()) errors.times = e.times;
        errors.columns.push_back("err_" + col);
        if (errors.rows.empty()) errors.rows.assign(e.times.size(), {});
        for (std::size_t i = 0; i < e.rows.size(); ++i) errors.rows[i].push_back(e.rows[i][0]);
    }
    if (rep.per_column.empty()) throw Error("runs share no comparable time series columns");

    auto profiles_of = [](const nlohmann::json& m, const fs::path& dir) {
        std::vector<fs::path> out;
        if (m.contains("profiles"))
            for (const auto& e : m["profiles"]) out.push_back(dir / e.at("file").get<std::string>());
        return out;
    };
    const auto pa = profiles_of(ma, dir_a);
    const auto pb = profiles_of(mb, dir_b);
    for (std::size_t k = 0; k < std::min(pa.size(), pb.size()); ++k) {
        auto load_prof = [](const fs::path& p) {
            std::ifstream in(p);
            if (!in) throw Error("missing profile: " + p.string());
            return read_profile_csv(in);
        };
        const double e = profile_max_rel_error(load_prof(pa[k]), load_prof(pb[k]));
        rep.per_profile.push_back({pa[k].filename().string(), e});
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        {
            std::ofstream out(fs::path(out_dir) / "errors.csv");
            if (!out) throw Error("cannot write errors.csv");
            write_timeseries_csv(errors, out);
        }
        std::ofstream sum(fs::path(out_dir) / "summary.txt");
        if (!sum) throw Error("cannot write summary.txt");
        for (const auto& [col, e] : rep.per_column)
            sum << "max relative error " << col << ": " << detail::fmt17(e) << "\n";
        for (const auto& [name, e] : rep.per_profile)
            sum << "max relative error control line " << name << ": " << detail::fmt17(e) << "\n";
    }
    return rep;
}

}  // namespace mtsa

#endif
