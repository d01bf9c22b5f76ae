#pragma once

#include <polydg/assembly.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <string>

namespace polydg {

class IndefiniteMatrixError : public Error {
public:
    IndefiniteMatrixError() : Error("matrix not positive definite; check chi_F / flux orientation") {}
};

enum class SolverKind { Auto, Dense, SparseDirect, CG };

inline const char* to_string(SolverKind s) {
    switch (s) {
    case SolverKind::Auto: return "auto";
    case SolverKind::Dense: return "dense";
    case SolverKind::SparseDirect: return "direct";
    case SolverKind::CG: return "cg";
    }
    return "?";
}

inline SolverKind parse_solver(const std::string& s) {
    if (s == "auto")
        return SolverKind::Auto;
    if (s == "dense")
        return SolverKind::Dense;
    if (s == "direct" || s == "sparse")
        return SolverKind::SparseDirect;
    if (s == "cg" || s == "pcg")
        return SolverKind::CG;
    throw Error("unknown solver \"" + s + "\" (expected auto, dense, direct or cg)");
}

struct SolveOptions {
    SolverKind kind = SolverKind::Auto;
    double tol = 1e-12;
    int max_iterations = 20000;
    std::size_t dense_limit = 500;
};

struct DiscreteSolution {
    Vector u;
    SolverKind solver = SolverKind::Auto;
    int iterations = 0;
    double residual = 0.0;  // ||A u - b|| / ||b||
    double seconds = 0.0;
    bool converged = false;
    bool indefinite = false;  // a negative pivot or negative curvature was seen
};

inline double relative_residual(const SparseMatrix& a, const Vector& u, const Vector& b) {
    const double nb = b.norm();
    const double nr = (a * u - b).norm();
    return nb > 0.0 ? nr / nb : nr;
}

namespace detail {

inline void solve_dense(const SparseMatrix& a, const Vector& b, DiscreteSolution& s) {
    const Matrix dense(a);
    Eigen::LDLT<Matrix> ldlt(dense);
    const bool factored = ldlt.info() == Eigen::Success;
    if (factored)
        s.indefinite = (ldlt.vectorD().array() <= 0.0).any();
    if (factored && !s.indefinite) {
        s.u = ldlt.solve(b);
    } else {
        s.u = Eigen::PartialPivLU<Matrix>(dense).solve(b);
        s.indefinite = true;
    }
}

inline void solve_sparse_direct(const SparseMatrix& a, const Vector& b, DiscreteSolution& s) {
    const Eigen::SparseMatrix<double> ac(a);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(ac);
    if (ldlt.info() == Eigen::Success) {
        s.indefinite = (ldlt.vectorD().array() <= 0.0).any();
        s.u = ldlt.solve(b);
        if (ldlt.info() == Eigen::Success && s.u.allFinite())
            return;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(ac);
    lu.factorize(ac);
    if (lu.info() != Eigen::Success)
        throw Error("solve: sparse factorization failed (singular matrix)");
    s.indefinite = true;
    s.u = lu.solve(b);
}

/// Inverses of the diagonal element blocks.
inline std::vector<Matrix> block_jacobi(const SparseMatrix& a, const DofMap& dofs) {
    std::vector<Matrix> inv(dofs.num_elements());
    for (index_t k = 0; k < dofs.num_elements(); ++k) {
        const auto o = static_cast<long>(dofs.offset(k));
        const int d = dofs.dim(k);
        Matrix blk = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i)
            for (SparseMatrix::InnerIterator it(a, o + i); it; ++it)
                if (it.col() >= o && it.col() < o + d)
                    blk(i, it.col() - o) = it.value();
        Eigen::LDLT<Matrix> ldlt(blk);
        if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
            throw IndefiniteMatrixError();
        inv[k] = ldlt.solve(Matrix::Identity(d, d));
    }
    return inv;
}

inline void solve_cg(const SparseMatrix& a, const Vector& b, const DofMap& dofs, const SolveOptions& opt,
                     DiscreteSolution& s) {
    const auto prec = block_jacobi(a, dofs);
    auto apply_prec = [&](const Vector& r) {
        Vector z(r.size());
        for (index_t k = 0; k < dofs.num_elements(); ++k) {
            const auto o = static_cast<Eigen::Index>(dofs.offset(k));
            z.segment(o, dofs.dim(k)) = prec[k] * r.segment(o, dofs.dim(k));
        }
        return z;
    };
    const double nb = b.norm();
    s.u = Vector::Zero(b.size());
    if (nb == 0.0) {
        s.converged = true;
        return;
    }
    Vector r = b;
    Vector z = apply_prec(r);
    Vector p = z;
    double rz = r.dot(z);
    for (int it = 0; it < opt.max_iterations; ++it) {
        const Vector ap = a * p;
        const double pap = p.dot(ap);
        if (!(pap > 0.0)) {
            s.indefinite = true;
            throw IndefiniteMatrixError();
        }
        const double alpha = rz / pap;
        s.u += alpha * p;
        r -= alpha * ap;
        s.iterations = it + 1;
        if (r.norm() <= opt.tol * nb) {
            s.converged = true;
            return;
        }
        z = apply_prec(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
}

}  // namespace detail

/// Dense LDLT for small systems, sparse LDLT otherwise, or block-Jacobi PCG on request.
/// Indefiniteness is reported through the flag (direct) or IndefiniteMatrixError (CG).
inline DiscreteSolution solve(const SparseMatrix& a, const Vector& b, const DofMap& dofs, const SolveOptions& opt = {}) {
    if (a.rows() != b.size() || a.cols() != b.size())
        throw Error("solve: matrix and right-hand side sizes differ");
    DiscreteSolution s;
    s.solver = opt.kind;
    if (s.solver == SolverKind::Auto)
        s.solver = static_cast<std::size_t>(b.size()) <= opt.dense_limit ? SolverKind::Dense : SolverKind::SparseDirect;
    const auto t0 = std::chrono::steady_clock::now();
    switch (s.solver) {
    case SolverKind::Dense: detail::solve_dense(a, b, s); break;
    case SolverKind::SparseDirect: detail::solve_sparse_direct(a, b, s); break;
    default: detail::solve_cg(a, b, dofs, opt, s); break;
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    s.residual = relative_residual(a, s.u, b);
    if (s.solver != SolverKind::CG)
        s.converged = s.u.allFinite() && s.residual <= std::max(opt.tol, 1e-8);
    return s;
}

inline DiscreteSolution solve(const AssembledSystem& sys, const SolveOptions& opt = {}) {
    return solve(sys.A, sys.b, sys.dofs, opt);
}

}  // namespace polydg
