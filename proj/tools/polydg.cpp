// polydg: run a single solve or one of the benchmark studies from a key=value config.
#include <polydg/studies.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace polydg;

namespace {

void write_json(const nlohmann::json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << j.dump(1) << "\n";
}

nlohmann::json solution_document(const Mesh& m, const RunResult& r, const ManufacturedSolution& ms) {
    nlohmann::json j = solution_json(m, r.dofs, r.u, &ms);
    j["method"] = r.row.method;
    j["n_elements"] = m.num_elements();
    j["err_l2"] = std::isfinite(r.row.err_l2) ? nlohmann::json(r.row.err_l2) : nlohmann::json(nullptr);
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polytopal DG solver and benchmark harness"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    unsigned threads = 1;
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "key=value run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "assembly threads")->check(CLI::Range(1u, 256u));
    app.add_option("--seed", seed, "mesh generator seed");
    app.fallthrough();
    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve", "one solve; also writes matrix.mtx, pattern.csv, solution.json"},
        {"h-study", "errors and rates over mesh.n for each degree"},
        {"p-study", "errors over degree on the first mesh"},
        {"chi-study", "CDG with chi from the assumption, 1 and 0.1 on four mesh families"},
        {"compare", "all four methods: timings, nnz, errors, cond2"},
        {"vardeg", "annulus degrees with correct and inverted flux orientation"}};
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help);
    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_config(config_path);
        cfg.threads = threads;
        cfg.seed = seed;
        const fs::path out(out_dir);
        fs::create_directories(out);

        StudyReport rep;
        if (cmd == "solve") {
            RunResult r;
            rep = run_solve(cfg, &r);
            if (r.ok) {
                const Mesh m = make_mesh(cfg.mesh_type, cfg.mesh_n.front(), cfg.seed, cfg.mesh_file);
                write_matrix_market(r.system->A, (out / "matrix.mtx").string(), true);
                write_pattern_csv(r.system->A, (out / "pattern.csv").string());
                write_json(solution_document(m, r, solution_by_name(cfg.ms)), out / "solution.json");
            }
        } else if (cmd == "h-study") {
            rep = run_h_study(cfg);
        } else if (cmd == "p-study") {
            rep = run_p_study(cfg);
        } else if (cmd == "chi-study") {
            rep = run_chi_study(cfg);
        } else if (cmd == "compare") {
            rep = run_method_comparison(cfg);
        } else {
            VariableDegreeOutcome o;
            rep = run_variable_degree_demo(cfg, &o);
            const Mesh m = make_mesh(cfg.mesh_type, cfg.mesh_n.front(), cfg.seed, cfg.mesh_file);
            const ManufacturedSolution ms = solution_by_name(cfg.ms);
            write_json({{"correct", solution_document(m, o.correct, ms)}, {"inverted", solution_document(m, o.inverted, ms)}},
                       out / "solution.json");
        }
        write_csv(rep, (out / "report.csv").string());
        rep.summary["command"] = cmd;
        rep.summary["config"] = serialize_config(cfg);
        rep.summary["seed"] = cfg.seed;
        rep.summary["messages"] = rep.messages;
        write_json(rep.summary, out / "summary.json");
        for (const std::string& msg : rep.messages)
            std::cerr << "warning: " << msg << "\n";
        std::cout << "wrote " << rep.rows.size() << " rows to " << (out / "report.csv").string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "polydg: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
