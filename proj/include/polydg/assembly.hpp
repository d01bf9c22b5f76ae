#pragma once

#include <polydg/basis.hpp>
#include <polydg/local_ops.hpp>
#include <polydg/method_config.hpp>
#include <polydg/sparse.hpp>

#include <algorithm>
#include <chrono>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace polydg {

struct AssembledSystem {
    SparseMatrix A;
    Vector b;
    DofMap dofs;
    MethodKind method = MethodKind::CDG;
    double assembly_seconds = 0.0;

    std::size_t size() const { return dofs.size(); }
};

struct AssemblyOptions {
    unsigned threads = 1;
};

namespace detail {

/// Run body(k, buffer, rhs) over all elements, each worker owning its buffer and rhs.
template <class Body>
void parallel_elements(std::size_t n_elements, std::size_t n_dofs, unsigned threads, std::vector<TripletBuffer>& bufs,
                       std::vector<Vector>& rhs, Body&& body) {
    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n_elements, 1))));
    bufs.assign(nt, {});
    rhs.assign(nt, Vector::Zero(static_cast<Eigen::Index>(n_dofs)));
    auto run = [&](unsigned t) {
        const std::size_t lo = n_elements * t / nt, hi = n_elements * (t + 1) / nt;
        for (std::size_t k = lo; k < hi; ++k)
            body(k, bufs[t], rhs[t]);
    };
    if (nt == 1) {
        run(0);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back(run, t);
    for (auto& th : pool)
        th.join();
}

inline Vector sum_rhs(std::vector<Vector>& rhs) {
    Vector b = std::move(rhs.front());
    for (std::size_t t = 1; t < rhs.size(); ++t)
        b += rhs[t];
    return b;
}

inline void check_inputs(const Mesh& m, const DegreeVector& degrees, const FacetParams& fp, const ProblemData& data) {
    if (degrees.size() != m.num_elements())
        throw Error("assembly: degree vector size does not match the mesh");
    if (fp.out.facets.size() != m.num_elements() || fp.chi.size() != m.num_facets())
        throw Error("assembly: facet parameters were built for a different mesh");
    if (!data.kappa.is_valid())
        throw Error("assembly: diffusion tensor must be symmetric positive definite");
}

inline Vector neumann_contributions(const Mesh& m, index_t r, const BasisSpec& spec, const QuadratureCache& qc,
                                    const ProblemData& data) {
    Vector b = Vector::Zero(spec.dim());
    for (index_t fid : m.elements[r].facets)
        if (m.facets[fid].kind == FacetKind::Neumann)
            b += neumann_vector(m.facets[fid], spec, qc.facet[fid], data.g_neumann);
    return b;
}

}  // namespace detail

/// Fast assembly for CDG (one-sided out-sets) and BR2 (every non-Neumann facet of K_r, weight 1/2).
inline AssembledSystem assemble_cdg_br2(const Mesh& m, const DegreeVector& degrees, const FacetParams& fp,
                                        const ProblemData& data, const QuadratureCache& qc,
                                        const AssemblyOptions& opt = {}) {
    detail::check_inputs(m, degrees, fp, data);
    if (fp.method != MethodKind::CDG && fp.method != MethodKind::BR2)
        throw Error(std::string("assemble_cdg_br2: facet parameters are for ") + to_string(fp.method));
    if ((fp.method == MethodKind::BR2) != fp.out.two_sided && m.num_facets() > 0) {
        const bool any_interior = std::any_of(m.facets.begin(), m.facets.end(), [](const Facet& f) { return f.is_interior(); });
        if (any_interior)
            throw Error("assemble_cdg_br2: out-sets do not match the method");
    }

    AssembledSystem sys;
    sys.dofs = DofMap(degrees);
    sys.method = fp.method;
    const double w_interior = fp.out.two_sided ? 0.5 : 1.0;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TripletBuffer> bufs;
    std::vector<Vector> rhs;
    detail::parallel_elements(m.num_elements(), sys.dofs.size(), opt.threads, bufs, rhs,
                              [&](index_t r, TripletBuffer& buf, Vector& b) {
        const BasisSpec sr = make_basis_spec(m, r, degrees[r]);
        const ElementOps e = element_ops(sr, qc.volume[r], data.kappa);
        const std::size_t off_r = sys.dofs.offset(r);

        Matrix arr = e.grad.transpose() * e.dmat * e.grad;
        Vector br = load_vector(sr, qc.volume[r], data.f);

        for (index_t fid : fp.out.facets[r]) {
            const Facet& f = m.facets[fid];
            const FacetQuadRule& q = qc.facet[fid];
            const double chi = fp.chi[fid];
            if (f.is_interior()) {
                const index_t s = f.other(r);
                const BasisSpec ss = make_basis_spec(m, s, degrees[s]);
                const Matrix brr = bav_diag_block(f, sr, w_interior, q);
                const Matrix brs = bav_offdiag_block(f, sr, ss, w_interior, q);
                const Matrix x = e.dmat * brr;
                const Matrix y = e.dmat * brs;
                const Matrix gx = e.grad.transpose() * x;
                arr += gx + gx.transpose() + chi * brr.transpose() * x;
                const Matrix ars = e.grad.transpose() * y + chi * brr.transpose() * y;
                const Matrix z = brs.transpose() * e.dmat;
                const Matrix asr = z * e.grad + chi * z * brr;
                // A_rs and A_sr agree up to roundoff through M^{-1}; emit their symmetric part.
                const Matrix sym = 0.5 * (ars + asr.transpose());
                const std::size_t off_s = sys.dofs.offset(s);
                add_block(buf, off_r, off_s, sym);
                add_block(buf, off_s, off_r, sym.transpose());
                const Matrix ass = chi * brs.transpose() * y;
                add_block(buf, off_s, off_s, 0.5 * (ass + ass.transpose()));
            } else {
                const Matrix brr = bav_diag_block(f, sr, 1.0, q);
                const Vector dg = e.dmat * dirichlet_vector(f, sr, q, data.g_dirichlet);
                br -= e.grad.transpose() * dg + chi * brr.transpose() * dg;
                const Matrix x = e.dmat * brr;
                const Matrix gx = e.grad.transpose() * x;
                arr += gx + gx.transpose() + chi * brr.transpose() * x;
            }
        }
        br += detail::neumann_contributions(m, r, sr, qc, data);
        // Products through an ill-conditioned M^{-1} are symmetric only up to roundoff.
        add_block(buf, off_r, off_r, 0.5 * (arr + arr.transpose()));
        b.segment(static_cast<Eigen::Index>(off_r), sr.dim()) += br;
    });
    sys.A = triplets_to_csr(bufs, sys.dofs.size());
    sys.b = detail::sum_rhs(rhs);
    sys.assembly_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sys;
}

/// Fast LDG assembly. The element loop set is N_K^out (weighted) or all of N_K (full).
inline AssembledSystem assemble_ldg(const Mesh& m, const DegreeVector& degrees, const FacetParams& fp,
                                    const ProblemData& data, const QuadratureCache& qc,
                                    const AssemblyOptions& opt = {}) {
    detail::check_inputs(m, degrees, fp, data);
    if (!is_ldg(fp.method))
        throw Error(std::string("assemble_ldg: facet parameters are for ") + to_string(fp.method));
    if (fp.eta.size() != m.num_facets())
        throw Error("assemble_ldg: missing penalty parameters");

    AssembledSystem sys;
    sys.dofs = DofMap(degrees);
    sys.method = fp.method;
    const double w_interior = fp.out.two_sided ? 0.5 : 1.0;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TripletBuffer> bufs;
    std::vector<Vector> rhs;
    detail::parallel_elements(m.num_elements(), sys.dofs.size(), opt.threads, bufs, rhs,
                              [&](index_t r, TripletBuffer& buf, Vector& b) {
        const BasisSpec sr = make_basis_spec(m, r, degrees[r]);
        const ElementOps e = element_ops(sr, qc.volume[r], data.kappa);
        const std::size_t off_r = sys.dofs.offset(r);

        // B_r. blocks keyed by column element; entry 0 is the diagonal block.
        std::vector<std::pair<index_t, Matrix>> blocks{{r, e.grad}};
        auto block_of = [&](index_t s, int cols) -> Matrix& {
            for (auto& [k, mat] : blocks)
                if (k == s)
                    return mat;
            blocks.emplace_back(s, Matrix::Zero(2 * sr.dim(), cols));
            return blocks.back().second;
        };

        Vector g = Vector::Zero(2 * sr.dim());
        bool has_dirichlet = false;
        for (index_t fid : fp.out.facets[r]) {
            const Facet& f = m.facets[fid];
            const FacetQuadRule& q = qc.facet[fid];
            if (f.is_interior()) {
                const index_t s = f.other(r);
                const BasisSpec ss = make_basis_spec(m, s, degrees[s]);
                blocks.front().second += bav_diag_block(f, sr, w_interior, q);
                block_of(s, ss.dim()) += bav_offdiag_block(f, sr, ss, w_interior, q);
            } else {
                blocks.front().second += bav_diag_block(f, sr, 1.0, q);
                g += dirichlet_vector(f, sr, q, data.g_dirichlet);
                has_dirichlet = true;
            }
        }

        Matrix srr = Matrix::Zero(sr.dim(), sr.dim());
        Vector br = load_vector(sr, qc.volume[r], data.f);
        for (index_t fid : m.elements[r].facets) {
            const Facet& f = m.facets[fid];
            const FacetQuadRule& q = qc.facet[fid];
            const double eta = fp.eta[fid];
            if (f.is_interior()) {
                const index_t s = f.other(r);
                const BasisSpec ss = make_basis_spec(m, s, degrees[s]);
                srr += eta * facet_mass(sr, sr, q);
                add_block(buf, off_r, sys.dofs.offset(s), -eta * facet_mass(sr, ss, q));
            } else if (f.kind == FacetKind::Dirichlet) {
                srr += stability_dirichlet_block(sr, eta, q);
                br += ldg_dirichlet_vector(sr, q, data.g_dirichlet, eta);
            } else {
                br += neumann_vector(f, sr, q, data.g_neumann);
            }
        }
        add_block(buf, off_r, off_r, srr);
        b.segment(static_cast<Eigen::Index>(off_r), sr.dim()) += br;

        const Vector dg = e.dmat * g;
        // Full double loop; A_ij and A_ji agree up to roundoff, so each pair is emitted as its symmetric part.
        const std::size_t nb = blocks.size();
        std::vector<Matrix> prod(nb * nb);
        for (std::size_t bi = 0; bi < nb; ++bi) {
            const auto& [i, bri] = blocks[bi];
            const Matrix left = bri.transpose() * e.dmat;
            for (std::size_t bj = 0; bj < nb; ++bj)
                prod[bi * nb + bj] = left * blocks[bj].second;
            if (has_dirichlet)
                b.segment(static_cast<Eigen::Index>(sys.dofs.offset(i)), bri.cols()) -= bri.transpose() * dg;
        }
        for (std::size_t bi = 0; bi < nb; ++bi)
            for (std::size_t bj = bi; bj < nb; ++bj) {
                const Matrix sym = 0.5 * (prod[bi * nb + bj] + prod[bj * nb + bi].transpose());
                const std::size_t off_i = sys.dofs.offset(blocks[bi].first), off_j = sys.dofs.offset(blocks[bj].first);
                add_block(buf, off_i, off_j, sym);
                if (bj != bi)
                    add_block(buf, off_j, off_i, sym.transpose());
            }
    });
    sys.A = triplets_to_csr(bufs, sys.dofs.size());
    sys.b = detail::sum_rhs(rhs);
    sys.assembly_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sys;
}

/// Dispatch on the method stored in the facet parameters.
inline AssembledSystem assemble(const Mesh& m, const DegreeVector& degrees, const FacetParams& fp,
                                const ProblemData& data, const QuadratureCache& qc, const AssemblyOptions& opt = {}) {
    return is_ldg(fp.method) ? assemble_ldg(m, degrees, fp, data, qc, opt)
                             : assemble_cdg_br2(m, degrees, fp, data, qc, opt);
}

inline AssembledSystem assemble(const Mesh& m, const DegreeVector& degrees, const FacetParams& fp,
                                const ProblemData& data, const AssemblyOptions& opt = {}) {
    const QuadratureCache qc = build_quadrature(m, degrees);
    return assemble(m, degrees, fp, data, qc, opt);
}

}  // namespace polydg
