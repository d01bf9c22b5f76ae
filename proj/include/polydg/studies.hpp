#pragma once

#include <polydg/analysis.hpp>
#include <polydg/config.hpp>
#include <polydg/mesh_generators.hpp>
#include <polydg/mesh_io.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace polydg {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct ReportRow {
    std::string study, method, mesh_type;
    std::size_t n_elements = 0;
    double h = nan_value;
    int p = 0;
    std::size_t n_dofs = 0, nnz = 0;
    double err_l2 = nan_value, err_cdg = nan_value;
    double rate_l2 = nan_value, rate_cdg = nan_value;
    double t_assembly_s = nan_value, t_solve_s = nan_value;
    double lambda_min = nan_value, cond2 = nan_value;
    int solver_iters = 0;
    double solver_residual = nan_value;
};

inline const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{
        "study",   "method",  "mesh_type", "n_elements", "h",           "p",         "n_dofs",     "nnz",
        "err_l2",  "err_cdg", "rate_l2",   "rate_cdg",   "t_assembly_s", "t_solve_s", "lambda_min", "cond2",
        "solver_iters", "solver_residual"};
    return cols;
}

/// Least-squares rate over the trailing window of one (study, method, mesh_type, p) sequence.
struct RateFit {
    std::string study, method, mesh_type;
    int p = 0;
    double rate_l2 = nan_value, rate_cdg = nan_value;
    std::size_t points = 0;
};

/// log(err) = a - c sqrt(N_dofs).
struct ExponentialFit {
    double c = nan_value, r2 = nan_value;
    double max_ratio = nan_value;  // largest err(p+1)/err(p)
};

struct StudyReport {
    std::vector<ReportRow> rows;
    std::vector<RateFit> fits;
    std::optional<ExponentialFit> exp_fit;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> messages;
};

// ---------------------------------------------------------------------------
// CSV

inline std::string format_value(double v) {
    if (!std::isfinite(v))
        return "";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

inline void write_csv(const StudyReport& r, std::ostream& os) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const ReportRow& w : r.rows)
        os << w.study << ',' << w.method << ',' << w.mesh_type << ',' << w.n_elements << ',' << format_value(w.h) << ','
           << w.p << ',' << w.n_dofs << ',' << w.nnz << ',' << format_value(w.err_l2) << ',' << format_value(w.err_cdg)
           << ',' << format_value(w.rate_l2) << ',' << format_value(w.rate_cdg) << ',' << format_value(w.t_assembly_s)
           << ',' << format_value(w.t_solve_s) << ',' << format_value(w.lambda_min) << ',' << format_value(w.cond2)
           << ',' << w.solver_iters << ',' << format_value(w.solver_residual) << "\n";
}

inline void write_csv(const StudyReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("write_csv: cannot open " + path);
    write_csv(r, out);
}

// ---------------------------------------------------------------------------
// Meshes and degrees

struct MeshOptions {
    std::size_t lloyd_iterations = 50;
    std::size_t agglomerate_base = 4050;  // minimum number of base triangles
};

/// A mesh of roughly n elements from one of the families.
/// Agglomerates come from a fixed fine triangulation, so refining them lowers the facet count per element.
inline Mesh make_mesh(const std::string& type, std::size_t n, std::uint64_t seed, const std::string& file = {},
                      const MeshOptions& opt = {}) {
    if (n == 0)
        throw Error("make_mesh: element count must be positive");
    if (type == "cartesian") {
        const auto k = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(static_cast<double>(n)))));
        return build_cartesian(k, k);
    }
    if (type == "triangular") {
        const auto k = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(0.5 * static_cast<double>(n)))));
        return build_triangular(k, k);
    }
    if (type == "voronoi")
        return build_voronoi(n, opt.lloyd_iterations, seed);
    if (type == "agglomerated") {
        const double base = std::max<double>(static_cast<double>(opt.agglomerate_base), 4.0 * static_cast<double>(n));
        const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(0.5 * base)));
        const double tris = 2.0 * static_cast<double>(k * k);
        const auto target = static_cast<std::size_t>(std::max(2.0, std::round(tris / static_cast<double>(n))));
        return agglomerate(build_triangular(k, k), target, seed);
    }
    if (type == "file")
        return load_mesh(file);
    throw Error("make_mesh: unknown mesh type \"" + type + "\"");
}

/// p + 1 on elements whose centroid satisfies |x^2 + y^2 - 0.8| < width, p elsewhere.
inline DegreeVector annulus_degrees(const Mesh& m, int p, double width = 0.15) {
    DegreeVector d(m.num_elements(), p);
    for (index_t k = 0; k < m.num_elements(); ++k) {
        const Point2 c = m.elements[k].centroid;
        if (std::abs(c.x * c.x + c.y * c.y - 0.8) < width)
            d[k] = p + 1;
    }
    return d;
}

inline DegreeVector make_degrees(const Mesh& m, int p, const std::string& rule) {
    if (rule == "annulus")
        return annulus_degrees(m, p);
    return uniform_degrees(m, p);
}

// ---------------------------------------------------------------------------
// One run

struct RunOptions {
    bool solve = true;
    bool eigenvalues = false;
    std::size_t eigen_limit = 30000;  // skip eigenvalues above this many dofs
    int max_repeats = 1;              // timings are the minimum over repeats
    double repeat_budget_s = 20.0;    // stop repeating once this much time was spent
    unsigned threads = 1;
};

struct RunResult {
    ReportRow row;
    DofMap dofs;
    Vector u;
    std::optional<AssembledSystem> system;
    FacetParams params;
    bool ok = false;
    bool indefinite = false;
    bool converged = false;
    std::string error;
};

namespace detail {

template <class F>
double min_time(F&& run, int max_repeats, double budget) {
    double best = std::numeric_limits<double>::infinity(), spent = 0.0;
    for (int i = 0; i < std::max(1, max_repeats); ++i) {
        const double t = run();
        best = std::min(best, t);
        spent += t;
        if (spent > budget)
            break;
    }
    return best;
}

}  // namespace detail

/// Assemble, solve and measure one configuration. Failures are recorded, not thrown.
inline RunResult run_single(const Mesh& m, const DegreeVector& degrees, const FluxConfig& flux,
                            const ManufacturedSolution& ms, const SolveOptions& sopt, const RunOptions& ropt,
                            ReportRow labels, bool keep_system = false) {
    RunResult r;
    r.row = std::move(labels);
    r.row.method = to_string(flux.method);
    r.row.n_elements = m.num_elements();
    r.row.h = m.meshsize;
    r.row.p = *std::max_element(degrees.begin(), degrees.end());
    try {
        const ProblemData data = make_problem(ms);
        const QuadratureCache qc = build_quadrature(m, degrees);
        r.params = make_facet_params(m, degrees, flux, data.kappa);
        AssembledSystem sys;
        const AssemblyOptions aopt{ropt.threads};
        r.row.t_assembly_s = detail::min_time(
            [&] {
                sys = assemble(m, degrees, r.params, data, qc, aopt);
                return sys.assembly_seconds;
            },
            ropt.max_repeats, ropt.repeat_budget_s);
        r.dofs = sys.dofs;
        r.row.n_dofs = sys.size();
        r.row.nnz = static_cast<std::size_t>(sys.A.nonZeros());

        if (ropt.solve) {
            DiscreteSolution s;
            r.row.t_solve_s = detail::min_time(
                [&] {
                    s = solve(sys, sopt);
                    return s.seconds;
                },
                ropt.max_repeats, ropt.repeat_budget_s);
            r.u = s.u;
            r.indefinite = s.indefinite;
            r.converged = s.converged;
            r.row.solver_iters = s.iterations;
            r.row.solver_residual = s.residual;
            if (s.u.allFinite()) {
                r.row.err_l2 = error_l2(m, sys.dofs, s.u, ms);
                r.row.err_cdg = error_cdg_norm(m, sys.dofs, r.params, s.u, ms, data.kappa);
            }
        }
        if (ropt.eigenvalues && sys.size() <= ropt.eigen_limit) {
            r.row.lambda_min = min_eigenvalue(sys.A);
            if (r.row.lambda_min > 0.0)
                r.row.cond2 = max_eigenvalue(sys.A) / r.row.lambda_min;
            else
                r.indefinite = true;
        }
        if (keep_system)
            r.system = std::move(sys);
        r.ok = true;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Fits

inline double slope(const std::vector<double>& x, const std::vector<double>& y, double* r2 = nullptr) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
    if (r2)
        *r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    return cxy / vx;
}

namespace detail {

/// Slope of log(err) against log(h) over rows idx; NaN when an error is at roundoff or missing.
inline double log_rate(const std::vector<ReportRow>& rows, const std::vector<std::size_t>& idx, double ReportRow::*err) {
    std::vector<double> x, y;
    for (std::size_t i : idx) {
        const double e = rows[i].*err;
        if (!std::isfinite(e) || e < 1e-11 || !(rows[i].h > 0.0))
            return nan_value;
        x.push_back(std::log(rows[i].h));
        y.push_back(std::log(e));
    }
    if (x.size() < 2 || x.front() == x.back())
        return nan_value;
    return slope(x, y);
}

}  // namespace detail

/// Per-row rates from the trailing window (up to `window` rows) of each sequence; the last row carries the fit.
inline std::vector<RateFit> fit_rates(std::vector<ReportRow>& rows, std::size_t window = 4) {
    std::map<std::tuple<std::string, std::string, std::string, int>, std::vector<std::size_t>> groups;
    std::vector<std::tuple<std::string, std::string, std::string, int>> order;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto key = std::make_tuple(rows[i].study, rows[i].method, rows[i].mesh_type, rows[i].p);
        if (!groups.contains(key))
            order.push_back(key);
        groups[key].push_back(i);
    }
    std::vector<RateFit> fits;
    for (const auto& key : order) {
        const auto& g = groups[key];
        for (std::size_t j = 1; j < g.size(); ++j) {
            const std::vector<std::size_t> win(g.begin() + static_cast<long>(j + 1 > window ? j + 1 - window : 0),
                                               g.begin() + static_cast<long>(j + 1));
            rows[g[j]].rate_l2 = detail::log_rate(rows, win, &ReportRow::err_l2);
            rows[g[j]].rate_cdg = detail::log_rate(rows, win, &ReportRow::err_cdg);
        }
        if (g.size() >= 2) {
            RateFit f{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                      rows[g.back()].rate_l2, rows[g.back()].rate_cdg, std::min(window, g.size())};
            fits.push_back(f);
        }
    }
    return fits;
}

inline ExponentialFit fit_exponential(const std::vector<ReportRow>& rows) {
    ExponentialFit f;
    std::vector<double> x, y;
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!(rows[i].err_l2 > 0.0))
            return f;
        x.push_back(std::sqrt(static_cast<double>(rows[i].n_dofs)));
        y.push_back(std::log(rows[i].err_l2));
        if (i > 0)
            worst = std::max(worst, rows[i].err_l2 / rows[i - 1].err_l2);
    }
    if (x.size() < 2)
        return f;
    f.c = -slope(x, y, &f.r2);
    f.max_ratio = worst;
    return f;
}

inline nlohmann::json fits_json(const StudyReport& r) {
    nlohmann::json j = nlohmann::json::array();
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    for (const RateFit& f : r.fits)
        j.push_back({{"study", f.study}, {"method", f.method}, {"mesh_type", f.mesh_type}, {"p", f.p},
                     {"rate_l2", num(f.rate_l2)}, {"rate_cdg", num(f.rate_cdg)}, {"points", f.points}});
    return j;
}

// ---------------------------------------------------------------------------
// Studies

namespace detail {

inline void record(StudyReport& rep, RunResult& r) {
    if (!r.ok)
        rep.messages.push_back(r.row.study + " " + r.row.method + " " + r.row.mesh_type + " n=" +
                               std::to_string(r.row.n_elements) + " p=" + std::to_string(r.row.p) + ": " + r.error);
    rep.rows.push_back(r.row);
}

inline ReportRow labels(const std::string& study, const std::string& mesh_type) {
    ReportRow w;
    w.study = study;
    w.mesh_type = mesh_type;
    return w;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1]))
            return false;
    return !v.empty();
}

}  // namespace detail

/// Single assemble + solve. Keeps the system and solution for export.
inline StudyReport run_solve(const RunConfig& cfg, RunResult* keep = nullptr) {
    StudyReport rep;
    const Mesh m = make_mesh(cfg.mesh_type, cfg.mesh_n.front(), cfg.seed, cfg.mesh_file);
    const DegreeVector deg = make_degrees(m, cfg.degree.front(), cfg.degree_rule);
    RunOptions ro;
    ro.eigenvalues = true;
    ro.eigen_limit = 20000;
    ro.threads = cfg.threads;
    RunResult r = run_single(m, deg, cfg.flux(), solution_by_name(cfg.ms), cfg.solver(), ro,
                             detail::labels("solve", cfg.mesh_type), keep != nullptr);
    detail::record(rep, r);
    if (keep)
        *keep = std::move(r);
    return rep;
}

/// Error and rate sequences over cfg.mesh_n for every degree in cfg.degree.
inline StudyReport run_h_study(const RunConfig& cfg) {
    StudyReport rep;
    std::vector<Mesh> meshes;
    for (std::size_t n : cfg.mesh_n)
        meshes.push_back(make_mesh(cfg.mesh_type, n, cfg.seed, cfg.mesh_file));
    RunOptions ro;
    ro.threads = cfg.threads;
    const ManufacturedSolution ms = solution_by_name(cfg.ms);
    for (int p : cfg.degree)
        for (const Mesh& m : meshes) {
            RunResult r = run_single(m, make_degrees(m, p, cfg.degree_rule), cfg.flux(), ms, cfg.solver(), ro,
                                     detail::labels("h-study", cfg.mesh_type));
            detail::record(rep, r);
        }
    rep.fits = fit_rates(rep.rows);
    rep.summary["fits"] = fits_json(rep);
    return rep;
}

/// Fixed mesh, increasing degree.
inline StudyReport run_p_study(const RunConfig& cfg) {
    StudyReport rep;
    const Mesh m = make_mesh(cfg.mesh_type, cfg.mesh_n.front(), cfg.seed, cfg.mesh_file);
    RunOptions ro;
    ro.threads = cfg.threads;
    const ManufacturedSolution ms = solution_by_name(cfg.ms);
    for (int p : cfg.degree) {
        RunResult r = run_single(m, make_degrees(m, p, cfg.degree_rule), cfg.flux(), ms, cfg.solver(), ro,
                                 detail::labels("p-study", cfg.mesh_type));
        detail::record(rep, r);
    }
    rep.exp_fit = fit_exponential(rep.rows);
    rep.summary["exp_fit"] = {{"c", rep.exp_fit->c}, {"r2", rep.exp_fit->r2}, {"max_ratio", rep.exp_fit->max_ratio}};
    return rep;
}

struct ChiMode {
    std::string name;
    std::optional<double> chi;
};

inline std::vector<ChiMode> chi_modes() { return {{"assumption", std::nullopt}, {"chi=1", 1.0}, {"chi=0.1", 0.1}}; }

inline std::vector<std::string> mesh_families() { return {"cartesian", "triangular", "voronoi", "agglomerated"}; }

struct ChiStudyOptions {
    std::vector<std::string> families = mesh_families();
    std::size_t coarse = 100, fine = 1000;
    std::vector<int> eigen_degrees{1, 4};
};

/// h-sequences at the top degree for each (family, chi mode), plus lambda_min on a coarse and a fine mesh.
/// Study labels: "chi-study/<mode>" for error rows, "chi-eig/<mode>" for eigenvalue rows.
inline StudyReport run_chi_study(const RunConfig& cfg, const ChiStudyOptions& opt = {}) {
    StudyReport rep;
    const ManufacturedSolution ms = solution_by_name(cfg.ms);
    const int p = cfg.degree.back();
    nlohmann::json& sum = rep.summary["families"];
    for (const std::string& fam : opt.families) {
        std::vector<Mesh> meshes;
        for (std::size_t n : cfg.mesh_n)
            meshes.push_back(make_mesh(fam, n, cfg.seed));
        const Mesh coarse = make_mesh(fam, opt.coarse, cfg.seed), fine = make_mesh(fam, opt.fine, cfg.seed);
        for (const ChiMode& mode : chi_modes()) {
            FluxConfig flux = cfg.flux();
            flux.method = MethodKind::CDG;
            flux.chi_override = mode.chi;
            std::vector<double> errs;
            RunOptions ro;
            ro.threads = cfg.threads;
            for (const Mesh& m : meshes) {
                RunResult r = run_single(m, uniform_degrees(m, p), flux, ms, cfg.solver(), ro,
                                         detail::labels("chi-study/" + mode.name, fam));
                errs.push_back(r.row.err_l2);
                detail::record(rep, r);
            }
            nlohmann::json& entry = sum[fam][mode.name];
            entry["monotone_l2"] = detail::strictly_decreasing(errs);

            RunOptions eo;
            eo.solve = false;
            eo.eigenvalues = true;
            eo.threads = cfg.threads;
            for (const auto& [label, mesh] : {std::pair<std::string, const Mesh*>{"coarse", &coarse}, {"fine", &fine}})
                for (int pe : opt.eigen_degrees) {
                    RunResult r = run_single(*mesh, uniform_degrees(*mesh, pe), flux, ms, cfg.solver(), eo,
                                             detail::labels("chi-eig/" + mode.name, fam));
                    detail::record(rep, r);
                    double facets = 0.0;
                    for (const Element& e : mesh->elements)
                        facets += static_cast<double>(e.facets.size());
                    entry["lambda_min"][label]["p" + std::to_string(pe)] =
                        std::isfinite(r.row.lambda_min) ? nlohmann::json(r.row.lambda_min) : nlohmann::json(nullptr);
                    entry["facets_per_element"][label] = facets / static_cast<double>(mesh->num_elements());
                }
        }
    }
    rep.fits = fit_rates(rep.rows);
    rep.summary["fits"] = fits_json(rep);
    return rep;
}

struct CompareOptions {
    std::vector<MethodKind> methods{MethodKind::CDG, MethodKind::BR2, MethodKind::LDG_w, MethodKind::LDG_f};
    std::size_t eigen_limit = 30000;
    int max_repeats = 3;
    double repeat_budget_s = 20.0;
};

/// All methods on every (mesh, degree): timings, nnz, errors and, for small systems, cond2.
inline StudyReport run_method_comparison(const RunConfig& cfg, const CompareOptions& opt = {}) {
    StudyReport rep;
    const ManufacturedSolution ms = solution_by_name(cfg.ms);
    RunOptions ro;
    ro.eigenvalues = true;
    ro.eigen_limit = opt.eigen_limit;
    ro.max_repeats = opt.max_repeats;
    ro.repeat_budget_s = opt.repeat_budget_s;
    ro.threads = cfg.threads;
    for (std::size_t n : cfg.mesh_n) {
        const Mesh m = make_mesh(cfg.mesh_type, n, cfg.seed, cfg.mesh_file);
        for (int p : cfg.degree)
            for (MethodKind mk : opt.methods) {
                FluxConfig flux = cfg.flux();
                flux.method = mk;
                RunResult r = run_single(m, make_degrees(m, p, cfg.degree_rule), flux, ms, cfg.solver(), ro,
                                         detail::labels("compare", cfg.mesh_type));
                detail::record(rep, r);
            }
    }
    return rep;
}

/// Element-wise solution for plotting: polygon, degree, Legendre coefficients and point values.
inline nlohmann::json solution_json(const Mesh& m, const DofMap& dofs, const Vector& u, const ManufacturedSolution* ms = nullptr) {
    nlohmann::json j;
    j["basis"] = "tensor Legendre on the element bounding box, orthonormal in L2(box), modes by total degree";
    j["elements"] = nlohmann::json::array();
    for (index_t k = 0; k < m.num_elements(); ++k) {
        const BasisSpec spec = make_basis_spec(m, k, dofs.degree(k));
        const Vector c = u.size() ? Vector(u.segment(static_cast<Eigen::Index>(dofs.offset(k)), spec.dim()))
                                  : Vector::Zero(spec.dim());
        const Element& e = m.elements[k];
        nlohmann::json el;
        el["id"] = k;
        el["degree"] = spec.degree;
        el["box"] = {e.box.xmin, e.box.ymin, e.box.xmax, e.box.ymax};
        nlohmann::json poly = nlohmann::json::array(), vals = nlohmann::json::array();
        for (Point2 x : m.polygon(k)) {
            poly.push_back({x.x, x.y});
            vals.push_back(eval_local(spec, c, x));
        }
        el["polygon"] = poly;
        el["vertex_values"] = vals;
        el["centroid"] = {e.centroid.x, e.centroid.y};
        el["centroid_value"] = eval_local(spec, c, e.centroid);
        if (ms)
            el["exact_centroid_value"] = ms->u(e.centroid);
        el["coefficients"] = std::vector<double>(c.data(), c.data() + c.size());
        j["elements"].push_back(std::move(el));
    }
    return j;
}

struct VariableDegreeOutcome {
    RunResult correct, inverted;
    bool correct_ok = false;
    bool inverted_flagged = false;
    std::vector<std::string> reasons;
};

/// Correct vs inverted one-sided fluxes with degree p+1 on the annulus and p elsewhere.
inline StudyReport run_variable_degree_demo(const RunConfig& cfg, VariableDegreeOutcome* out = nullptr) {
    StudyReport rep;
    const Mesh m = make_mesh(cfg.mesh_type, cfg.mesh_n.front(), cfg.seed, cfg.mesh_file);
    const DegreeVector deg = annulus_degrees(m, cfg.degree.front());
    const ManufacturedSolution ms = solution_by_name(cfg.ms);
    RunOptions ro;
    ro.eigenvalues = true;
    ro.threads = cfg.threads;
    VariableDegreeOutcome o;
    for (Orientation orient : {Orientation::Correct, Orientation::Inverted}) {
        FluxConfig flux = cfg.flux();
        flux.orientation = orient;
        const bool correct = orient == Orientation::Correct;
        RunResult r = run_single(m, deg, flux, ms, cfg.solver(), ro,
                                 detail::labels(correct ? "vardeg/correct" : "vardeg/inverted", cfg.mesh_type));
        detail::record(rep, r);
        (correct ? o.correct : o.inverted) = std::move(r);
    }
    o.correct_ok = o.correct.ok && o.correct.converged && std::isfinite(o.correct.row.err_l2);
    const RunResult& inv = o.inverted;
    if (!inv.ok || !inv.converged)
        o.reasons.push_back("solver breakdown");
    if (inv.ok && !(inv.row.lambda_min > 0.0))
        o.reasons.push_back("lambda_min <= 0");
    if (inv.ok && !(inv.row.err_l2 <= 10.0 * o.correct.row.err_l2))
        o.reasons.push_back("error > 10x correct");
    o.inverted_flagged = !o.reasons.empty();
    rep.summary["correct_ok"] = o.correct_ok;
    rep.summary["inverted_flagged"] = o.inverted_flagged;
    rep.summary["reasons"] = o.reasons;
    rep.summary["error_ratio"] = inv.row.err_l2 / o.correct.row.err_l2;
    if (out)
        *out = std::move(o);
    return rep;
}

}  // namespace polydg
