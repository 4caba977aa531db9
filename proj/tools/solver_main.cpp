#include <CLI11.hpp>

#include "mtsa/msh_io.hpp"
#include "mtsa/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitThreshold = 3;

int cmd_run(const std::string& config_path, const std::string& mode_flag,
            const std::string& out_flag, const std::vector<std::string>& overrides) {
    mtsa::ProblemConfig cfg;
    mtsa::MeshMode mode;
    try {
        cfg = mtsa::load_problem_config(config_path, overrides);
        mode = mtsa::parse_mode(mode_flag.empty() ? cfg.mode : mode_flag);
        if (!out_flag.empty()) cfg.output.directory = out_flag;
        // Problem construction is config validation: every name must resolve.
        mtsa::build_problem(cfg, mode);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
    try {
        mtsa::RunResult res = mtsa::run_and_write(cfg, mode, cfg.output.directory);
        std::printf("run complete: %zu time levels, outputs in %s\n", res.states.size(),
                    cfg.output.directory.c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    }
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, const std::string& out_dir,
                double threshold) {
    mtsa::CompareReport rep;
    try {
        rep = mtsa::compare_runs(dir_a, dir_b, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "compare error: %s\n", e.what());
        return kExitConfig;
    }
    for (const auto& [col, e] : rep.per_column)
        std::printf("max relative error %s: %.17g\n", col.c_str(), e);
    for (const auto& [name, e] : rep.per_profile)
        std::printf("max relative error control line %s: %.17g\n", name.c_str(), e);
    if (rep.worst() > threshold) {
        std::printf("worst error %.17g exceeds threshold %.17g\n", rep.worst(), threshold);
        return kExitThreshold;
    }
    return kExitOk;
}

int cmd_mesh_info(const std::string& config_path, const std::string& mode_flag,
                  const std::vector<std::string>& overrides) {
    try {
        mtsa::ProblemConfig cfg = mtsa::load_problem_config(config_path, overrides);
        mtsa::MeshMode mode = mtsa::parse_mode(mode_flag.empty() ? cfg.mode : mode_flag);
        mtsa::Problem problem = mtsa::build_problem(cfg, mode);
        const mtsa::Mesh& mesh = problem.mesh;
        mtsa::DofMap dm = mtsa::build_dofmap(problem);

        std::printf("nodes: %zu\ntriangles: %zu\nboundary edges: %zu\n", mesh.nodes.size(),
                    mesh.triangles.size(), mesh.boundary_edges.size());
        std::map<int, std::size_t> per_region;
        for (const auto& t : mesh.triangles) per_region[t.region_tag]++;
        for (const auto& [tag, cnt] : per_region)
            std::printf("region %s (%d): %zu elements\n", mesh.name_of(tag).c_str(), tag, cnt);
        std::printf("total area: %.17g\n", mesh.total_area());

        int sheet_dofs = 0, lambda_dofs = 0;
        for (const auto& f : dm.ifaces) {
            std::printf("interface %s: side1 %zu nodes, side2 %zu nodes, carrier %zu nodes\n",
                        f.name.c_str(), f.g1->size(), f.g2->size(), f.hat->size());
            for (int j = 0; j <= f.n_layers; ++j)
                if (!f.sheet_aliased(j)) sheet_dofs += f.m;
            if (f.lam1 >= 0) lambda_dofs += f.m;
            if (f.lam2 >= 0) lambda_dofs += f.m;
        }
        std::printf("dofs: volume %d, sheets %d, multipliers %d, total %d\n", dm.n_volume,
                    sheet_dofs, lambda_dofs, dm.total);
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transient nonlinear heat conduction with mortar thin-shell interfaces"};
    app.require_subcommand(1);

    std::string config_path, mode_flag, out_flag;
    std::vector<std::string> overrides;
    double threshold = std::numeric_limits<double>::infinity();
    std::string dir_a, dir_b;

    CLI::App* run = app.add_subcommand("run", "Run a configured problem");
    run->add_option("--config", config_path, "TOML configuration file")->required();
    run->add_option("--mode", mode_flag, "reference or mortar_tsa (overrides the config)");
    run->add_option("--out", out_flag, "output directory (overrides the config)");
    run->add_option("--override", overrides, "dotted-path key=value override");

    CLI::App* cmp = app.add_subcommand("compare", "Compare two completed run directories");
    cmp->add_option("dir_a", dir_a, "first run directory")->required();
    cmp->add_option("dir_b", dir_b, "second run directory")->required();
    cmp->add_option("--out", out_flag, "report directory")->default_val("compare_out");
    cmp->add_option("--threshold", threshold, "exit 3 if the worst relative error exceeds this");

    CLI::App* info = app.add_subcommand("mesh-info", "Print mesh and DoF statistics");
    info->add_option("--config", config_path, "TOML configuration file")->required();
    info->add_option("--mode", mode_flag, "reference or mortar_tsa (overrides the config)");
    info->add_option("--override", overrides, "dotted-path key=value override");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, mode_flag, out_flag, overrides);
    if (cmp->parsed()) return cmd_compare(dir_a, dir_b, out_flag, threshold);
    return cmd_mesh_info(config_path, mode_flag, overrides);
}
