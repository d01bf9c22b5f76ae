#pragma once

#include <polydg/geometry.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace polydg {

/// Compressed sparse row matrix; explicit zeros written during assembly are kept.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, long>;
using Triplet = Eigen::Triplet<double, long>;
using TripletBuffer = std::vector<Triplet>;

/// Append a dense block at (row0, col0).
template <class Derived>
void add_block(TripletBuffer& buf, std::size_t row0, std::size_t col0, const Eigen::MatrixBase<Derived>& expr) {
    // Evaluate once; coefficient access on a product expression recomputes the product.
    const auto& blk = expr.eval();
    for (Eigen::Index i = 0; i < blk.rows(); ++i)
        for (Eigen::Index j = 0; j < blk.cols(); ++j)
            buf.emplace_back(static_cast<long>(row0) + i, static_cast<long>(col0) + j, blk(i, j));
}

/// Sum duplicates and sort columns within rows.
inline SparseMatrix triplets_to_csr(const TripletBuffer& buf, std::size_t n) {
    for (const Triplet& t : buf)
        if (t.row() < 0 || t.col() < 0 || static_cast<std::size_t>(t.row()) >= n || static_cast<std::size_t>(t.col()) >= n)
            throw Error("triplets_to_csr: index (" + std::to_string(t.row()) + ", " + std::to_string(t.col()) +
                        ") out of range for n = " + std::to_string(n));
    SparseMatrix a(static_cast<long>(n), static_cast<long>(n));
    a.setFromTriplets(buf.begin(), buf.end());
    a.makeCompressed();
    return a;
}

inline SparseMatrix triplets_to_csr(const std::vector<TripletBuffer>& bufs, std::size_t n) {
    if (bufs.size() == 1)
        return triplets_to_csr(bufs.front(), n);
    std::size_t total = 0;
    for (const auto& b : bufs)
        total += b.size();
    TripletBuffer all;
    all.reserve(total);
    for (const auto& b : bufs)
        all.insert(all.end(), b.begin(), b.end());
    return triplets_to_csr(all, n);
}

/// max |A_ij - A_ji|.
inline double symmetry_defect(const SparseMatrix& a) {
    const SparseMatrix d = a - SparseMatrix(a.transpose());
    double m = 0.0;
    for (long k = 0; k < d.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(d, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

inline double max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (long k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

inline bool is_symmetric(const SparseMatrix& a, double tol) {
    for (long k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            if (std::abs(it.value() - a.coeff(it.col(), it.row())) > tol)
                return false;
    return true;
}

/// Matrix Market coordinate export; symmetric matrices store the lower triangle.
inline void write_matrix_market(const SparseMatrix& a, const std::string& path, bool symmetric) {
    std::ofstream out(path);
    if (!out)
        throw Error("write_matrix_market: cannot write " + path);
    std::size_t count = 0;
    for (long k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            if (!symmetric || it.col() <= it.row())
                ++count;
    out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << '\n';
    out << a.rows() << ' ' << a.cols() << ' ' << count << '\n';
    char buf[64];
    for (long k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            if (!symmetric || it.col() <= it.row()) {
                std::snprintf(buf, sizeof buf, "%.17g", it.value());
                out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
            }
}

/// Sparsity pattern as "row,col" lines (0-based).
inline void write_pattern_csv(const SparseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("write_pattern_csv: cannot write " + path);
    out << "row,col\n";
    for (long k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            out << it.row() << ',' << it.col() << '\n';
}

}  // namespace polydg
