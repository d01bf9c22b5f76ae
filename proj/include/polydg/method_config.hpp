#pragma once

#include <polydg/basis.hpp>
#include <polydg/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace polydg {

enum class MethodKind { CDG, BR2, LDG_w, LDG_f };
enum class Orientation { Correct, Inverted };

inline const char* to_string(MethodKind m) {
    switch (m) {
    case MethodKind::CDG: return "cdg";
    case MethodKind::BR2: return "br2";
    case MethodKind::LDG_w: return "ldg_w";
    case MethodKind::LDG_f: return "ldg_f";
    }
    return "?";
}

inline MethodKind parse_method(const std::string& s) {
    if (s == "cdg" || s == "CDG")
        return MethodKind::CDG;
    if (s == "br2" || s == "BR2")
        return MethodKind::BR2;
    if (s == "ldg_w" || s == "LDG_w" || s == "ldgw")
        return MethodKind::LDG_w;
    if (s == "ldg_f" || s == "LDG_f" || s == "ldgf")
        return MethodKind::LDG_f;
    throw Error("unknown method \"" + s + "\" (expected cdg, br2, ldg_w or ldg_f)");
}

/// Methods whose averages are arithmetic (alpha = 1/2) on interior facets.
constexpr bool is_two_sided(MethodKind m) { return m == MethodKind::BR2 || m == MethodKind::LDG_f; }
constexpr bool is_ldg(MethodKind m) { return m == MethodKind::LDG_w || m == MethodKind::LDG_f; }

/// Constant symmetric positive definite diffusion tensor.
struct DiffusionTensor {
    double xx = 1.0, xy = 0.0, yy = 1.0;

    double lambda_min() const {
        const double m = 0.5 * (xx + yy), d = std::hypot(0.5 * (xx - yy), xy);
        return m - d;
    }
    double lambda_max() const {
        const double m = 0.5 * (xx + yy), d = std::hypot(0.5 * (xx - yy), xy);
        return m + d;
    }
    Point2 apply(Point2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    bool is_valid() const { return std::isfinite(xx) && std::isfinite(xy) && std::isfinite(yy) && lambda_min() > 0.0; }
};

struct FluxConfig {
    MethodKind method = MethodKind::CDG;
    Point2 sweep_direction{1.0, 0.0};
    double gamma = 0.9;
    std::optional<double> chi_override;
    double eta_scale = 10.0;
    Orientation orientation = Orientation::Correct;

    void validate() const {
        if (!(gamma > 0.0 && gamma < 1.0))
            throw Error("FluxConfig: gamma must lie in (0,1)");
        if (chi_override && !(*chi_override > 0.0))
            throw Error("FluxConfig: chi override must be positive");
        if (!(eta_scale > 0.0))
            throw Error("FluxConfig: eta scale must be positive");
    }
};

/// Weighted-average parameter per facet (meaningful on interior facets only).
/// alpha = 1 takes the vector trace from adjacent[0], alpha = 0 from adjacent[1].
inline std::vector<double> assign_alpha(const Mesh& m, const DegreeVector& degrees, const FluxConfig& cfg) {
    std::vector<double> alpha(m.num_facets(), 1.0);
    for (const Facet& f : m.facets) {
        if (!f.is_interior())
            continue;
        if (is_two_sided(cfg.method)) {
            alpha[f.id] = 0.5;
            continue;
        }
        const int p1 = degrees[f.adjacent[0]], p2 = degrees[f.adjacent[1]];
        if (p1 != p2) {
            bool first_is_higher = p1 > p2;
            if (cfg.orientation == Orientation::Inverted)
                first_is_higher = !first_is_higher;
            alpha[f.id] = first_is_higher ? 1.0 : 0.0;
        } else {
            alpha[f.id] = dot(f.normal, cfg.sweep_direction) >= 0.0 ? 1.0 : 0.0;
        }
    }
    return alpha;
}

/// F_K^out / N_K^out per element, plus the lifting owner K_F and nu_F^out per facet.
/// For two-sided averages every interior facet is lifted on both neighbors, so
/// the sets become F_K restricted to interior and Dirichlet facets.
struct OutSets {
    bool two_sided = false;
    std::vector<std::vector<index_t>> facets;    // F_K^out
    std::vector<std::vector<index_t>> elements;  // N_K^out (contains K when F_K^out is nonempty)
    std::vector<index_t> owner;                  // K_F, no_element for Neumann / two-sided interior
    std::vector<std::size_t> nu_out;             // |F_{K_F}^out|; two-sided: max(|F_K1|, |F_K2|)
};

inline OutSets compute_out_sets(const Mesh& m, const std::vector<double>& alpha) {
    OutSets out;
    const std::size_t ne = m.num_elements();
    out.facets.assign(ne, {});
    out.elements.assign(ne, {});
    out.owner.assign(m.num_facets(), no_element);
    out.nu_out.assign(m.num_facets(), 0);

    bool any_half = false, any_one_sided = false;
    for (const Facet& f : m.facets) {
        if (!f.is_interior())
            continue;
        if (alpha[f.id] == 0.5)
            any_half = true;
        else if (alpha[f.id] == 0.0 || alpha[f.id] == 1.0)
            any_one_sided = true;
        else
            throw Error("compute_out_sets: alpha must be 0, 1 or 1/2");
    }
    if (any_half && any_one_sided)
        throw Error("compute_out_sets: mixed one-sided and arithmetic averages");
    out.two_sided = any_half;

    for (index_t k = 0; k < ne; ++k) {
        for (index_t fid : m.elements[k].facets) {
            const Facet& f = m.facets[fid];
            if (f.kind == FacetKind::Neumann)
                continue;
            if (f.kind == FacetKind::Dirichlet) {
                out.facets[k].push_back(fid);
                out.owner[fid] = k;
            } else if (out.two_sided) {
                out.facets[k].push_back(fid);
            } else {
                const index_t kf = alpha[fid] == 1.0 ? f.adjacent[0] : f.adjacent[1];
                if (kf == k) {
                    out.facets[k].push_back(fid);
                    out.owner[fid] = k;
                }
            }
        }
        auto& nk = out.elements[k];
        for (index_t fid : out.facets[k]) {
            const Facet& f = m.facets[fid];
            nk.push_back(k);
            if (f.is_interior())
                nk.push_back(f.other(k));
        }
        std::sort(nk.begin(), nk.end());
        nk.erase(std::unique(nk.begin(), nk.end()), nk.end());
    }

    for (const Facet& f : m.facets) {
        if (f.kind == FacetKind::Neumann)
            continue;
        if (out.two_sided && f.is_interior())
            out.nu_out[f.id] = std::max(m.elements[f.adjacent[0]].facets.size(), m.elements[f.adjacent[1]].facets.size());
        else if (out.two_sided)
            out.nu_out[f.id] = m.elements[f.adjacent[0]].facets.size();
        else
            out.nu_out[f.id] = out.facets[out.owner[f.id]].size();
    }
    return out;
}

/// chi_F = nu_F^out / gamma (equality in the coercivity assumption), or a constant override.
inline std::vector<double> assign_chi(const Mesh& m, const OutSets& out, const FluxConfig& cfg) {
    cfg.validate();
    std::vector<double> chi(m.num_facets(), 0.0);
    for (const Facet& f : m.facets) {
        if (f.kind == FacetKind::Neumann)
            continue;
        chi[f.id] = cfg.chi_override ? *cfg.chi_override : static_cast<double>(out.nu_out[f.id]) / cfg.gamma;
        if (!(chi[f.id] > 0.0))
            throw Error("assign_chi: chi_F must be positive on facet " + std::to_string(f.id));
    }
    return chi;
}

/// Interior-penalty scaling C_eta * |kappa| * max(p)^2 / min(h) on interior and Dirichlet facets.
inline std::vector<double> assign_eta(const Mesh& m, const DegreeVector& degrees, const FluxConfig& cfg,
                                      const DiffusionTensor& kappa) {
    std::vector<double> eta(m.num_facets(), 0.0);
    const double kbar = kappa.lambda_max();
    for (const Facet& f : m.facets) {
        if (f.kind == FacetKind::Neumann)
            continue;
        int p = degrees[f.adjacent[0]];
        double h = m.elements[f.adjacent[0]].diameter;
        if (f.is_interior()) {
            p = std::max(p, degrees[f.adjacent[1]]);
            h = std::min(h, m.elements[f.adjacent[1]].diameter);
        }
        eta[f.id] = cfg.eta_scale * kbar * static_cast<double>(p * p) / h;
    }
    return eta;
}

/// Everything the assemblers need to know about the facets.
struct FacetParams {
    MethodKind method = MethodKind::CDG;
    std::vector<double> alpha;
    OutSets out;
    std::vector<double> chi;
    std::vector<double> eta;  // empty unless LDG
};

inline FacetParams make_facet_params(const Mesh& m, const DegreeVector& degrees, const FluxConfig& cfg,
                                     const DiffusionTensor& kappa = {}) {
    cfg.validate();
    if (degrees.size() != m.num_elements())
        throw Error("make_facet_params: degree vector size does not match the mesh");
    FacetParams fp;
    fp.method = cfg.method;
    fp.alpha = assign_alpha(m, degrees, cfg);
    fp.out = compute_out_sets(m, fp.alpha);
    fp.chi = assign_chi(m, fp.out, cfg);
    if (is_ldg(cfg.method))
        fp.eta = assign_eta(m, degrees, cfg, kappa);
    return fp;
}

}  // namespace polydg
