#pragma once

#include <polydg/assembly.hpp>
#include <polydg/manufactured.hpp>
#include <polydg/solve.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace polydg {

inline int error_order(int p) { return 2 * p + 4; }

/// ||u - u_h||_{L2(Omega)}.
inline double error_l2(const Mesh& m, const DofMap& dofs, const Vector& uh, const ScalarFunction& u) {
    double sum = 0.0;
    for (index_t k = 0; k < m.num_elements(); ++k) {
        const BasisSpec spec = make_basis_spec(m, k, dofs.degree(k));
        const QuadRule q = volume_quadrature(m, k, error_order(spec.degree));
        const Matrix v = eval_basis(spec, q.points);
        const Vector vals = v.transpose() * uh.segment(static_cast<Eigen::Index>(dofs.offset(k)), spec.dim());
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double e = u(q.points[i]) - vals[static_cast<Eigen::Index>(i)];
            sum += q.weights[i] * e * e;
        }
    }
    return std::sqrt(sum);
}

inline double error_l2(const Mesh& m, const DofMap& dofs, const Vector& uh, const ManufacturedSolution& ms) {
    return error_l2(m, dofs, uh, ms.u);
}

/// |||u - u_h|||_CDG. Liftings live on K_F, or on both neighbors for two-sided averages.
/// Pass ms = nullptr for the norm of u_h itself with homogeneous boundary data.
inline double error_cdg_norm(const Mesh& m, const DofMap& dofs, const FacetParams& fp, const Vector& uh,
                             const ManufacturedSolution* ms, const DiffusionTensor& kappa = {}) {
    double grad_term = 0.0, lift_term = 0.0;
    const double w_interior = fp.out.two_sided ? 0.5 : 1.0;
    const ScalarFunction zero = [](Point2) { return 0.0; };
    const ScalarFunction gd = ms ? ms->u : zero;
    for (index_t k = 0; k < m.num_elements(); ++k) {
        const BasisSpec spec = make_basis_spec(m, k, dofs.degree(k));
        const Vector uk = uh.segment(static_cast<Eigen::Index>(dofs.offset(k)), spec.dim());
        const QuadRule q = volume_quadrature(m, k, error_order(spec.degree));
        const auto [gx, gy] = eval_basis_grad(spec, q.points);
        const Vector ex = gx.transpose() * uk, ey = gy.transpose() * uk;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const Point2 g = ms ? ms->grad(q.points[i]) : Point2{};
            const Point2 e{g.x - ex[static_cast<Eigen::Index>(i)], g.y - ey[static_cast<Eigen::Index>(i)]};
            grad_term += q.weights[i] * dot(e, kappa.apply(e));
        }

        if (fp.out.facets[k].empty())
            continue;
        const QuadRule vq = volume_quadrature(m, k, volume_order(spec.degree));
        const ElementOps ops = element_ops(spec, vq, kappa);
        for (index_t fid : fp.out.facets[k]) {
            const Facet& f = m.facets[fid];
            int pf = spec.degree;
            Vector rhs;
            if (f.is_interior()) {
                const index_t s = f.other(k);
                pf = std::max(pf, dofs.degree(s));
                const FacetQuadRule fq = facet_quadrature(f, facet_order(pf));
                const BasisSpec ss = make_basis_spec(m, s, dofs.degree(s));
                const Vector us = uh.segment(static_cast<Eigen::Index>(dofs.offset(s)), ss.dim());
                rhs = bav_diag_block(f, spec, w_interior, fq) * uk + bav_offdiag_block(f, spec, ss, w_interior, fq) * us;
            } else {
                const FacetQuadRule fq = facet_quadrature(f, facet_order(pf) + 4);
                rhs = -dirichlet_vector(f, spec, fq, gd) - bav_diag_block(f, spec, 1.0, fq) * uk;
            }
            const Vector c = ops.mass_inv * rhs;
            lift_term += fp.chi[fid] * c.dot(ops.diffusion * c);
        }
    }
    return std::sqrt(grad_term + lift_term);
}

inline double error_cdg_norm(const Mesh& m, const DofMap& dofs, const FacetParams& fp, const Vector& uh,
                             const ManufacturedSolution& ms, const DiffusionTensor& kappa = {}) {
    return error_cdg_norm(m, dofs, fp, uh, &ms, kappa);
}

// ---------------------------------------------------------------------------
// Eigenvalues

struct EigenEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Lanczos with full reorthogonalization for an extreme eigenvalue of a symmetric operator.
template <class Op>
EigenEstimate lanczos_extreme(const Op& apply, Eigen::Index n, bool largest, double tol, int max_iterations,
                              std::uint64_t seed = 1) {
    const int kmax = static_cast<int>(std::min<Eigen::Index>(max_iterations, n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix v(n, kmax + 1);
    Vector q(n);
    for (Eigen::Index i = 0; i < n; ++i)
        q[i] = gauss(rng);
    v.col(0) = q / q.norm();
    std::vector<double> alpha, beta;
    EigenEstimate est;
    for (int j = 0; j < kmax; ++j) {
        Vector w = apply(v.col(j));
        const double a = v.col(j).dot(w);
        alpha.push_back(a);
        w -= a * v.col(j);
        if (j > 0)
            w -= beta.back() * v.col(j - 1);
        for (int pass = 0; pass < 2; ++pass)
            w -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * w);
        const double b = w.norm();
        est.iterations = j + 1;

        const bool check = j + 1 == kmax || b == 0.0 || (j + 1) % 5 == 0;
        if (check) {
            const int m = j + 1;
            Vector d = Eigen::Map<const Vector>(alpha.data(), m);
            Vector e = m > 1 ? Vector(Eigen::Map<const Vector>(beta.data(), m - 1)) : Vector();
            Eigen::SelfAdjointEigenSolver<Matrix> tri;
            tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
            const Eigen::Index idx = largest ? m - 1 : 0;
            est.value = tri.eigenvalues()[idx];
            const double resid = b * std::abs(tri.eigenvectors()(m - 1, idx));
            const double scale = tri.eigenvalues().cwiseAbs().maxCoeff();
            if (resid <= tol * std::max(scale, 1e-300) || b == 0.0) {
                est.converged = true;
                return est;
            }
        }
        beta.push_back(b);
        v.col(j + 1) = w / b;
    }
    return est;
}

struct EigenOptions {
    std::size_t dense_limit = 1500;
    double tol = 1e-8;
    int max_iterations = 5000;
};

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const SparseMatrix& a, const EigenOptions& opt = {}) {
    const Eigen::Index n = a.rows();
    if (n == 0)
        throw Error("min_eigenvalue: empty matrix");
    if (static_cast<std::size_t>(n) <= opt.dense_limit) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(a), Eigen::EigenvaluesOnly);
        return es.eigenvalues()[0];
    }
    const Eigen::SparseMatrix<double> ac(a);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(ac);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
        // Shift-invert: the largest eigenvalue of A^{-1} is 1 / lambda_min.
        const EigenEstimate e = lanczos_extreme([&](const Vector& x) -> Vector { return ldlt.solve(x); }, n, true,
                                                opt.tol, opt.max_iterations);
        if (e.converged)
            return 1.0 / e.value;
    }
    const EigenEstimate e =
        lanczos_extreme([&](const Vector& x) -> Vector { return a * x; }, n, false, opt.tol, opt.max_iterations);
    if (!e.converged)
        throw Error("min_eigenvalue: Lanczos did not converge after " + std::to_string(e.iterations) +
                    " iterations (best estimate " + std::to_string(e.value) + ")");
    return e.value;
}

inline double max_eigenvalue(const SparseMatrix& a, const EigenOptions& opt = {}) {
    const Eigen::Index n = a.rows();
    if (static_cast<std::size_t>(n) <= opt.dense_limit) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(a), Eigen::EigenvaluesOnly);
        return es.eigenvalues()[n - 1];
    }
    const EigenEstimate e =
        lanczos_extreme([&](const Vector& x) -> Vector { return a * x; }, n, true, opt.tol, opt.max_iterations);
    if (!e.converged)
        throw Error("max_eigenvalue: Lanczos did not converge");
    return e.value;
}

/// Dominant eigenvalue by power iteration with Rayleigh quotients.
inline EigenEstimate power_iteration(const SparseMatrix& a, double tol = 1e-6, int max_iterations = 100000) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    Vector x(a.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = gauss(rng);
    x.normalize();
    EigenEstimate est;
    for (int it = 0; it < max_iterations; ++it) {
        const Vector y = a * x;
        const double theta = x.dot(y);
        est.iterations = it + 1;
        est.value = theta;
        if ((y - theta * x).norm() <= tol * std::abs(theta)) {
            est.converged = true;
            return est;
        }
        x = y / y.norm();
    }
    return est;
}

/// lambda_max / lambda_min for a symmetric positive definite matrix.
inline double condition_estimate(const SparseMatrix& a, const EigenOptions& opt = {}) {
    const double lmin = min_eigenvalue(a, opt);
    if (!(lmin > 0.0))
        throw IndefiniteMatrixError();
    return max_eigenvalue(a, opt) / lmin;
}

// ---------------------------------------------------------------------------
// Stencil

struct StencilStats {
    std::size_t nnz = 0;
    std::size_t block_count = 0;
    std::map<std::size_t, std::size_t> blocks_per_element;  // histogram: blocks in a block row -> elements
};

inline StencilStats stencil_stats(const SparseMatrix& a, const DofMap& dofs) {
    std::vector<index_t> owner(dofs.size());
    for (index_t k = 0; k < dofs.num_elements(); ++k)
        for (int i = 0; i < dofs.dim(k); ++i)
            owner[dofs.offset(k) + static_cast<std::size_t>(i)] = k;
    StencilStats s;
    s.nnz = static_cast<std::size_t>(a.nonZeros());
    for (index_t k = 0; k < dofs.num_elements(); ++k) {
        std::set<index_t> cols;
        for (int i = 0; i < dofs.dim(k); ++i)
            for (SparseMatrix::InnerIterator it(a, static_cast<long>(dofs.offset(k)) + i); it; ++it)
                cols.insert(owner[static_cast<std::size_t>(it.col())]);
        s.block_count += cols.size();
        ++s.blocks_per_element[cols.size()];
    }
    return s;
}

struct MatrixDiagnostics {
    std::size_t nnz = 0;
    std::size_t block_count = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double cond2 = 0.0;  // 0 when not positive definite
    double symmetry_defect = 0.0;
};

inline MatrixDiagnostics diagnose(const AssembledSystem& sys, bool eigenvalues = true, const EigenOptions& opt = {}) {
    MatrixDiagnostics d;
    const StencilStats st = stencil_stats(sys.A, sys.dofs);
    d.nnz = st.nnz;
    d.block_count = st.block_count;
    d.symmetry_defect = symmetry_defect(sys.A);
    if (eigenvalues) {
        d.lambda_min = min_eigenvalue(sys.A, opt);
        d.lambda_max = max_eigenvalue(sys.A, opt);
        if (d.lambda_min > 0.0)
            d.cond2 = d.lambda_max / d.lambda_min;
    }
    return d;
}

}  // namespace polydg
