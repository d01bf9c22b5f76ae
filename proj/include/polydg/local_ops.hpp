#pragma once

#include <polydg/basis.hpp>
#include <polydg/method_config.hpp>
#include <polydg/quadrature.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace polydg {

/// Boundary flux data g_N(x, n_Omega).
using BoundaryFunction = std::function<double(Point2, Point2)>;

struct ProblemData {
    DiffusionTensor kappa;
    ScalarFunction f = [](Point2) { return 0.0; };
    ScalarFunction g_dirichlet = [](Point2) { return 0.0; };
    BoundaryFunction g_neumann = [](Point2, Point2) { return 0.0; };
};

inline int volume_order(int p) { return 2 * p + 2; }
inline int facet_order(int p_max) { return 2 * p_max + 3; }

/// Quadrature rules for every element and facet, built once per (mesh, degrees).
struct QuadratureCache {
    std::vector<QuadRule> volume;
    std::vector<FacetQuadRule> facet;
};

inline QuadratureCache build_quadrature(const Mesh& m, const DegreeVector& degrees) {
    QuadratureCache qc;
    qc.volume.reserve(m.num_elements());
    for (index_t k = 0; k < m.num_elements(); ++k)
        qc.volume.push_back(volume_quadrature(m, k, volume_order(degrees[k])));
    qc.facet.reserve(m.num_facets());
    for (const Facet& f : m.facets) {
        int p = degrees[f.adjacent[0]];
        if (f.is_interior())
            p = std::max(p, degrees[f.adjacent[1]]);
        qc.facet.push_back(facet_quadrature(f, facet_order(p)));
    }
    return qc;
}

namespace detail {

inline Eigen::Map<const Vector> weights_of(const QuadRule& q) {
    return {q.weights.data(), static_cast<Eigen::Index>(q.size())};
}

/// Stack [nx * T; ny * T] for a scalar block T.
inline Matrix stack_normal(const Matrix& t, Point2 n) {
    Matrix out(2 * t.rows(), t.cols());
    out.topRows(t.rows()) = n.x * t;
    out.bottomRows(t.rows()) = n.y * t;
    return out;
}

}  // namespace detail

/// Scalar facet mass T_ij = int_F phi_i^a phi_j^b dS.
inline Matrix facet_mass(const BasisSpec& a, const BasisSpec& b, const FacetQuadRule& q) {
    const Matrix va = eval_basis(a, q.points);
    const Matrix vb = a.element == b.element && a.degree == b.degree ? va : eval_basis(b, q.points);
    return va * detail::weights_of(q).asDiagonal() * vb.transpose();
}

inline Matrix mass_block(const BasisSpec& spec, const QuadRule& q) {
    const Matrix ms = element_mass(spec, q);
    const Eigen::Index n = ms.rows();
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = ms;
    m.bottomRightCorner(n, n) = ms;
    return m;
}

inline Matrix diffusion_block(const BasisSpec& spec, const QuadRule& q, const DiffusionTensor& kappa) {
    const Matrix ms = element_mass(spec, q);
    const Eigen::Index n = ms.rows();
    Matrix d(2 * n, 2 * n);
    d.topLeftCorner(n, n) = kappa.xx * ms;
    d.topRightCorner(n, n) = kappa.xy * ms;
    d.bottomLeftCorner(n, n) = kappa.xy * ms;
    d.bottomRightCorner(n, n) = kappa.yy * ms;
    return d;
}

/// -int_K psi_i . grad phi_j, 2 Lambda x Lambda.
inline Matrix grad_block(const BasisSpec& spec, const QuadRule& q) {
    const Matrix v = eval_basis(spec, q.points);
    const auto [gx, gy] = eval_basis_grad(spec, q.points);
    const auto w = detail::weights_of(q);
    const Eigen::Index n = v.rows();
    Matrix b(2 * n, n);
    b.topRows(n) = -(v * w.asDiagonal() * gx.transpose());
    b.bottomRows(n) = -(v * w.asDiagonal() * gy.transpose());
    return b;
}

/// w * int_F psi_i^r . (phi_j^r n_{K_r}) dS.
inline Matrix bav_diag_block(const Facet& f, const BasisSpec& r, double w, const FacetQuadRule& q) {
    return detail::stack_normal(w * facet_mass(r, r, q), f.normal_of(r.element));
}

/// -w * int_F psi_i^r . (phi_j^s n_{K_r}) dS.
inline Matrix bav_offdiag_block(const Facet& f, const BasisSpec& r, const BasisSpec& s, double w,
                                const FacetQuadRule& q) {
    return detail::stack_normal(-w * facet_mass(r, s, q), f.normal_of(r.element));
}

/// Interior-facet penalty blocks eta * int_F phi^a phi^b with signs (+, -, -, +).
struct StabilityBlocks {
    Matrix s11, s12, s21, s22;
};

inline StabilityBlocks stability_blocks(const BasisSpec& k1, const BasisSpec& k2, double eta, const FacetQuadRule& q) {
    StabilityBlocks s;
    s.s11 = eta * facet_mass(k1, k1, q);
    s.s12 = -eta * facet_mass(k1, k2, q);
    s.s21 = s.s12.transpose();
    s.s22 = eta * facet_mass(k2, k2, q);
    return s;
}

inline Matrix stability_dirichlet_block(const BasisSpec& k, double eta, const FacetQuadRule& q) {
    return eta * facet_mass(k, k, q);
}

inline Vector load_vector(const BasisSpec& spec, const QuadRule& q, const ScalarFunction& f) {
    const Matrix v = eval_basis(spec, q.points);
    Vector fw(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i)
        fw[static_cast<Eigen::Index>(i)] = q.weights[i] * f(q.points[i]);
    return v * fw;
}

inline Vector neumann_vector(const Facet& f, const BasisSpec& spec, const FacetQuadRule& q, const BoundaryFunction& gn) {
    const Matrix v = eval_basis(spec, q.points);
    Vector gw(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i)
        gw[static_cast<Eigen::Index>(i)] = q.weights[i] * gn(q.points[i], f.normal);
    return v * gw;
}

/// -int_F psi_i^r . (g_D n_{K_r}) dS, length 2 Lambda.
inline Vector dirichlet_vector(const Facet& f, const BasisSpec& r, const FacetQuadRule& q, const ScalarFunction& gd) {
    const Matrix v = eval_basis(r, q.points);
    Vector gw(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i)
        gw[static_cast<Eigen::Index>(i)] = q.weights[i] * gd(q.points[i]);
    const Vector s = v * gw;
    const Point2 n = f.normal_of(r.element);
    Vector g(2 * s.size());
    g.head(s.size()) = -n.x * s;
    g.tail(s.size()) = -n.y * s;
    return g;
}

/// eta * int_F g_D phi_i dS.
inline Vector ldg_dirichlet_vector(const BasisSpec& r, const FacetQuadRule& q, const ScalarFunction& gd, double eta) {
    const Matrix v = eval_basis(r, q.points);
    Vector gw(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i)
        gw[static_cast<Eigen::Index>(i)] = eta * q.weights[i] * gd(q.points[i]);
    return v * gw;
}

/// Volume quantities of one element: M^{-1}, D, B^grad and the weighted inverse M^{-1} D M^{-1}.
struct ElementOps {
    BasisSpec spec;
    Matrix mass_inv;
    Matrix diffusion;
    Matrix grad;
    Matrix dmat;
};

inline ElementOps element_ops(const BasisSpec& spec, const QuadRule& q, const DiffusionTensor& kappa) {
    ElementOps e;
    e.spec = spec;
    const Matrix m = mass_block(spec, q);
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw Error("element_ops: singular mass matrix on element " + std::to_string(spec.element));
    e.mass_inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
    e.diffusion = diffusion_block(spec, q, kappa);
    e.grad = grad_block(spec, q);
    e.dmat = e.mass_inv * e.diffusion * e.mass_inv;
    return e;
}

}  // namespace polydg
