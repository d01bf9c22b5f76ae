#pragma once

#include <polydg/mesh.hpp>
#include <polydg/quadrature.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace polydg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-element polynomial degree p_K >= 1.
using DegreeVector = std::vector<int>;

/// Dimension of the 2D polynomial space of total degree <= p.
constexpr int basis_dim(int p) { return (p + 1) * (p + 2) / 2; }

/// Tensor Legendre basis P_i(xi) P_j(eta), i + j <= p, on the element's bounding box,
/// orthonormal in L2(box). Modes are ordered by total degree, x-degree descending.
struct BasisSpec {
    index_t element = 0;
    int degree = 1;
    BoundingBox box;

    int dim() const { return basis_dim(degree); }
};

inline BasisSpec make_basis_spec(const Mesh& m, index_t k, int degree) {
    return BasisSpec{k, degree, m.elements[k].box};
}

namespace detail {

/// Orthonormal 1D Legendre values and derivatives (w.r.t. the reference
/// coordinate) up to degree p at t in [-1,1], scaled by sqrt(2i+1).
inline void scaled_legendre(int p, double t, double* val, double* der) {
    val[0] = 1.0;
    der[0] = 0.0;
    if (p >= 1) {
        val[1] = t;
        der[1] = 1.0;
    }
    for (int n = 2; n <= p; ++n) {
        val[n] = ((2.0 * n - 1.0) * t * val[n - 1] - (n - 1.0) * val[n - 2]) / n;
        der[n] = der[n - 2] + (2.0 * n - 1.0) * val[n - 1];
    }
    for (int n = 0; n <= p; ++n) {
        const double s = std::sqrt(2.0 * n + 1.0);
        val[n] *= s;
        der[n] *= s;
    }
}

constexpr int max_degree = 12;

}  // namespace detail

/// Values of all basis functions at one point, written to out[0..dim).
inline void eval_basis_at(const BasisSpec& spec, Point2 x, double* out) {
    const int p = spec.degree;
    double vx[detail::max_degree + 1], dx[detail::max_degree + 1];
    double vy[detail::max_degree + 1], dy[detail::max_degree + 1];
    const Point2 c = spec.box.center();
    const double hx = spec.box.width(), hy = spec.box.height();
    detail::scaled_legendre(p, 2.0 * (x.x - c.x) / hx, vx, dx);
    detail::scaled_legendre(p, 2.0 * (x.y - c.y) / hy, vy, dy);
    const double scale = 1.0 / std::sqrt(hx * hy);
    int idx = 0;
    for (int k = 0; k <= p; ++k)
        for (int j = 0; j <= k; ++j)
            out[idx++] = scale * vx[k - j] * vy[j];
}

/// Gradients of all basis functions at one point.
inline void eval_basis_grad_at(const BasisSpec& spec, Point2 x, double* gx, double* gy) {
    const int p = spec.degree;
    double vx[detail::max_degree + 1], dx[detail::max_degree + 1];
    double vy[detail::max_degree + 1], dy[detail::max_degree + 1];
    const Point2 c = spec.box.center();
    const double hx = spec.box.width(), hy = spec.box.height();
    detail::scaled_legendre(p, 2.0 * (x.x - c.x) / hx, vx, dx);
    detail::scaled_legendre(p, 2.0 * (x.y - c.y) / hy, vy, dy);
    const double scale = 1.0 / std::sqrt(hx * hy);
    const double sx = 2.0 / hx, sy = 2.0 / hy;
    int idx = 0;
    for (int k = 0; k <= p; ++k)
        for (int j = 0; j <= k; ++j) {
            gx[idx] = scale * sx * dx[k - j] * vy[j];
            gy[idx] = scale * sy * vx[k - j] * dy[j];
            ++idx;
        }
}

/// Basis values, dim x npts.
inline Matrix eval_basis(const BasisSpec& spec, std::span<const Point2> pts) {
    if (spec.degree > detail::max_degree)
        throw Error("eval_basis: degree above " + std::to_string(detail::max_degree) + " is not supported");
    Matrix v(spec.dim(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t q = 0; q < pts.size(); ++q)
        eval_basis_at(spec, pts[q], v.col(static_cast<Eigen::Index>(q)).data());
    return v;
}

/// Basis gradients (d/dx, d/dy), each dim x npts.
inline std::pair<Matrix, Matrix> eval_basis_grad(const BasisSpec& spec, std::span<const Point2> pts) {
    if (spec.degree > detail::max_degree)
        throw Error("eval_basis_grad: degree above " + std::to_string(detail::max_degree) + " is not supported");
    Matrix gx(spec.dim(), static_cast<Eigen::Index>(pts.size()));
    Matrix gy(spec.dim(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t q = 0; q < pts.size(); ++q)
        eval_basis_grad_at(spec, pts[q], gx.col(static_cast<Eigen::Index>(q)).data(),
                           gy.col(static_cast<Eigen::Index>(q)).data());
    return {std::move(gx), std::move(gy)};
}

/// Global numbering of the scalar unknowns: element blocks in element order.
class DofMap {
public:
    DofMap() = default;
    explicit DofMap(const DegreeVector& degrees) : degrees_(degrees), offsets_(degrees.size() + 1, 0) {
        for (std::size_t k = 0; k < degrees.size(); ++k) {
            if (degrees[k] < 1)
                throw Error("DofMap: element " + std::to_string(k) + " has degree < 1");
            offsets_[k + 1] = offsets_[k] + static_cast<std::size_t>(basis_dim(degrees[k]));
        }
    }
    std::size_t offset(index_t k) const { return offsets_[k]; }
    int dim(index_t k) const { return basis_dim(degrees_[k]); }
    int degree(index_t k) const { return degrees_[k]; }
    std::size_t size() const { return offsets_.back(); }
    std::size_t num_elements() const { return degrees_.size(); }
    const DegreeVector& degrees() const { return degrees_; }

private:
    DegreeVector degrees_;
    std::vector<std::size_t> offsets_;
};

inline DegreeVector uniform_degrees(const Mesh& m, int p) { return DegreeVector(m.num_elements(), p); }

using ScalarFunction = std::function<double(Point2)>;

/// Scalar mass matrix of the element basis on the polygon.
inline Matrix element_mass(const BasisSpec& spec, const QuadRule& rule) {
    const Matrix v = eval_basis(spec, rule.points);
    const Eigen::Map<const Vector> w(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
    return v * w.asDiagonal() * v.transpose();
}

/// L2(K) projection of f onto the element polynomials.
inline Vector l2_project(const Mesh& m, index_t k, const BasisSpec& spec, const ScalarFunction& f) {
    const QuadRule rule = volume_quadrature(m, k, 2 * spec.degree + 4);
    const Matrix v = eval_basis(spec, rule.points);
    Vector rhs = Vector::Zero(spec.dim());
    for (std::size_t q = 0; q < rule.size(); ++q)
        rhs += (rule.weights[q] * f(rule.points[q])) * v.col(static_cast<Eigen::Index>(q));
    const Matrix mass = element_mass(spec, rule);
    Eigen::LLT<Matrix> llt(mass);
    if (llt.info() != Eigen::Success)
        throw Error("l2_project: singular local mass matrix on element " + std::to_string(k));
    return llt.solve(rhs);
}

/// Element-wise L2 projection of f onto the broken polynomial space.
inline Vector l2_project(const Mesh& m, const DofMap& dofs, const ScalarFunction& f) {
    Vector u(static_cast<Eigen::Index>(dofs.size()));
    for (index_t k = 0; k < m.num_elements(); ++k)
        u.segment(static_cast<Eigen::Index>(dofs.offset(k)), dofs.dim(k)) =
            l2_project(m, k, make_basis_spec(m, k, dofs.degree(k)), f);
    return u;
}

/// Evaluate the discrete function of element k at x.
inline double eval_local(const BasisSpec& spec, const Vector& coeffs, Point2 x) {
    double v[basis_dim(detail::max_degree)];
    eval_basis_at(spec, x, v);
    double s = 0.0;
    for (int i = 0; i < spec.dim(); ++i)
        s += coeffs[i] * v[i];
    return s;
}

}  // namespace polydg
