#pragma once

#include <polydg/assembly.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

namespace polydg {

/// Largest system the definitional assembler accepts.
inline constexpr std::size_t definitional_max_dofs = 2000;

namespace detail {

/// Scaled monomials ((x-c)/h)^a ((y-c)/h)^b, a + b <= p.
struct MonomialBasis {
    Point2 c;
    double h = 1.0;
    int p = 1;

    int dim() const { return basis_dim(p); }

    Matrix eval(std::span<const Point2> pts) const {
        Matrix v(dim(), static_cast<Eigen::Index>(pts.size()));
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const double x = (pts[q].x - c.x) / h, y = (pts[q].y - c.y) / h;
            int idx = 0;
            for (int k = 0; k <= p; ++k)
                for (int j = 0; j <= k; ++j)
                    v(idx++, static_cast<Eigen::Index>(q)) = std::pow(x, k - j) * std::pow(y, j);
        }
        return v;
    }
};

/// Values at the quadrature points of element `element` of the lifting of each dof in `dofs`,
/// plus the monomial coefficients (for evaluation on facets).
struct LiftedField {
    index_t element = 0;
    std::vector<std::size_t> dofs;
    Matrix lx, ly;  // nq x ndofs
    Matrix cx, cy;  // monomial coefficients, dim x ndofs
    MonomialBasis basis;
};

struct FacetLifting {
    index_t facet = 0;
    std::vector<std::size_t> dofs;
    Matrix trace;                     // signed traces at facet points, nq_F x ndofs
    std::vector<LiftedField> fields;  // one per supporting element
};

inline MonomialBasis monomials_for(const Mesh& m, index_t k, int p) {
    return {m.elements[k].centroid, m.elements[k].diameter, p};
}

/// Solve int_K L . r = omega * int_F phi n . r for each trace column phi.
inline LiftedField lift_onto(const Mesh& m, index_t k, int p, const QuadRule& vq, const FacetQuadRule& fq,
                             const Matrix& trace, Point2 n, double omega, const std::vector<std::size_t>& dofs) {
    LiftedField lf;
    lf.element = k;
    lf.dofs = dofs;
    lf.basis = monomials_for(m, k, p);
    const Matrix mv = lf.basis.eval(vq.points);
    const Matrix mass = mv * weights_of(vq).asDiagonal() * mv.transpose();
    const Matrix mf = lf.basis.eval(fq.points);
    const Matrix rhs = omega * (mf * weights_of(fq).asDiagonal() * trace);
    const Eigen::FullPivLU<Matrix> lu(mass);
    const Matrix c = lu.solve(rhs);
    lf.cx = n.x * c;
    lf.cy = n.y * c;
    lf.lx = mv.transpose() * lf.cx;
    lf.ly = mv.transpose() * lf.cy;
    return lf;
}

}  // namespace detail

/// Dense assembly of A_h and l_h straight from the lifting definitions (small meshes only).
/// Covers all four methods; LDG uses int kappa (grad u - L u).(grad v - L v) + s_h.
inline AssembledSystem assemble_definitional(const Mesh& m, const DegreeVector& degrees, const FacetParams& fp,
                                             const ProblemData& data) {
    detail::check_inputs(m, degrees, fp, data);
    AssembledSystem sys;
    sys.dofs = DofMap(degrees);
    sys.method = fp.method;
    const std::size_t n = sys.dofs.size();
    if (n > definitional_max_dofs)
        throw Error("assemble_definitional: " + std::to_string(n) + " dofs exceeds the limit of " +
                    std::to_string(definitional_max_dofs));
    const bool ldg = is_ldg(fp.method);
    const DiffusionTensor& kap = data.kappa;
    const auto t0 = std::chrono::steady_clock::now();

    // Volume rules at a higher order than the fast path, so the two do not share rounding.
    std::vector<QuadRule> vq;
    std::vector<FacetQuadRule> fq;
    for (index_t k = 0; k < m.num_elements(); ++k)
        vq.push_back(volume_quadrature(m, k, 2 * degrees[k] + 4));
    for (const Facet& f : m.facets) {
        int p = degrees[f.adjacent[0]];
        if (f.is_interior())
            p = std::max(p, degrees[f.adjacent[1]]);
        fq.push_back(facet_quadrature(f, 2 * p + 5));
    }

    auto dofs_of = [&](index_t k) {
        std::vector<std::size_t> d(static_cast<std::size_t>(sys.dofs.dim(k)));
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = sys.dofs.offset(k) + i;
        return d;
    };

    // Local liftings of every facet, evaluated on their supporting elements.
    std::vector<detail::FacetLifting> lifts;
    for (const Facet& f : m.facets) {
        if (f.kind == FacetKind::Neumann)
            continue;
        detail::FacetLifting fl;
        fl.facet = f.id;
        const FacetQuadRule& q = fq[f.id];
        const index_t k1 = f.adjacent[0];
        const Matrix t1 = eval_basis(make_basis_spec(m, k1, degrees[k1]), q.points).transpose();
        fl.dofs = dofs_of(k1);
        if (f.is_interior()) {
            const index_t k2 = f.adjacent[1];
            const Matrix t2 = eval_basis(make_basis_spec(m, k2, degrees[k2]), q.points).transpose();
            const auto d2 = dofs_of(k2);
            fl.dofs.insert(fl.dofs.end(), d2.begin(), d2.end());
            fl.trace.resize(t1.rows(), t1.cols() + t2.cols());
            fl.trace << t1, -t2;
            const double a = fp.alpha[f.id];
            if (a != 0.0)
                fl.fields.push_back(detail::lift_onto(m, k1, degrees[k1], vq[k1], q, fl.trace, f.normal, a, fl.dofs));
            if (a != 1.0)
                fl.fields.push_back(
                    detail::lift_onto(m, k2, degrees[k2], vq[k2], q, fl.trace, f.normal, 1.0 - a, fl.dofs));
        } else {
            fl.trace = t1;
            fl.fields.push_back(detail::lift_onto(m, k1, degrees[k1], vq[k1], q, fl.trace, f.normal, 1.0, fl.dofs));
        }
        lifts.push_back(std::move(fl));
    }

    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Vector b = Vector::Zero(static_cast<Eigen::Index>(n));

    // Gather the global lifting on each element: its local dof list and field values.
    struct ElementField {
        std::vector<std::size_t> dofs;
        Matrix gx, gy, lx, ly;
        Vector gdx, gdy;  // Dirichlet lifting of g_D
    };
    std::vector<ElementField> ef(m.num_elements());
    for (index_t k = 0; k < m.num_elements(); ++k) {
        ef[k].dofs = dofs_of(k);
        const Eigen::Index nq = static_cast<Eigen::Index>(vq[k].size());
        ef[k].gdx = Vector::Zero(nq);
        ef[k].gdy = Vector::Zero(nq);
    }
    for (const auto& fl : lifts)
        for (const auto& lf : fl.fields)
            for (std::size_t d : lf.dofs) {
                auto& v = ef[lf.element].dofs;
                if (std::find(v.begin(), v.end(), d) == v.end())
                    v.push_back(d);
            }
    for (index_t k = 0; k < m.num_elements(); ++k) {
        auto& e = ef[k];
        const Eigen::Index nq = static_cast<Eigen::Index>(vq[k].size());
        const Eigen::Index nd = static_cast<Eigen::Index>(e.dofs.size());
        e.gx = e.gy = e.lx = e.ly = Matrix::Zero(nq, nd);
        const auto [gx, gy] = eval_basis_grad(make_basis_spec(m, k, degrees[k]), vq[k].points);
        e.gx.leftCols(gx.rows()) = gx.transpose();
        e.gy.leftCols(gy.rows()) = gy.transpose();
    }
    auto column_of = [](const std::vector<std::size_t>& v, std::size_t d) {
        return static_cast<Eigen::Index>(std::find(v.begin(), v.end(), d) - v.begin());
    };
    for (const auto& fl : lifts)
        for (const auto& lf : fl.fields) {
            auto& e = ef[lf.element];
            for (std::size_t c = 0; c < lf.dofs.size(); ++c) {
                const Eigen::Index col = column_of(e.dofs, lf.dofs[c]);
                e.lx.col(col) += lf.lx.col(static_cast<Eigen::Index>(c));
                e.ly.col(col) += lf.ly.col(static_cast<Eigen::Index>(c));
            }
        }

    auto kappa_apply = [&](const Matrix& x, const Matrix& y, Matrix& ox, Matrix& oy) {
        ox = kap.xx * x + kap.xy * y;
        oy = kap.xy * x + kap.yy * y;
    };

    // Dirichlet liftings of g_D (LDG right-hand side).
    if (ldg)
        for (const Facet& f : m.facets) {
            if (f.kind != FacetKind::Dirichlet)
                continue;
            const FacetQuadRule& q = fq[f.id];
            Matrix gd(static_cast<Eigen::Index>(q.size()), 1);
            for (std::size_t i = 0; i < q.size(); ++i)
                gd(static_cast<Eigen::Index>(i), 0) = data.g_dirichlet(q.points[i]);
            const index_t k = f.adjacent[0];
            const auto lf = detail::lift_onto(m, k, degrees[k], vq[k], q, gd, f.normal, 1.0, {0});
            ef[k].gdx += lf.lx.col(0);
            ef[k].gdy += lf.ly.col(0);
        }

    for (index_t k = 0; k < m.num_elements(); ++k) {
        const auto& e = ef[k];
        const auto w = detail::weights_of(vq[k]);
        Matrix kgx, kgy;
        kappa_apply(e.gx, e.gy, kgx, kgy);
        Matrix block;
        if (ldg) {
            const Matrix rx = e.gx - e.lx, ry = e.gy - e.ly;
            Matrix krx, kry;
            kappa_apply(rx, ry, krx, kry);
            block = rx.transpose() * w.asDiagonal() * krx + ry.transpose() * w.asDiagonal() * kry;
            Matrix kdx, kdy;
            kappa_apply(e.gdx, e.gdy, kdx, kdy);
            const Vector rb = rx.transpose() * w.asDiagonal() * kdx + ry.transpose() * w.asDiagonal() * kdy;
            for (std::size_t i = 0; i < e.dofs.size(); ++i)
                b[static_cast<Eigen::Index>(e.dofs[i])] -= rb[static_cast<Eigen::Index>(i)];
        } else {
            // rows: test dof, cols: trial dof
            block = e.gx.transpose() * w.asDiagonal() * (kgx - (kap.xx * e.lx + kap.xy * e.ly)) +
                    e.gy.transpose() * w.asDiagonal() * (kgy - (kap.xy * e.lx + kap.yy * e.ly)) -
                    (e.lx.transpose() * w.asDiagonal() * kgx + e.ly.transpose() * w.asDiagonal() * kgy);
        }
        for (std::size_t i = 0; i < e.dofs.size(); ++i)
            for (std::size_t j = 0; j < e.dofs.size(); ++j)
                a(static_cast<Eigen::Index>(e.dofs[i]), static_cast<Eigen::Index>(e.dofs[j])) +=
                    block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

        const Matrix v = eval_basis(make_basis_spec(m, k, degrees[k]), vq[k].points);
        for (std::size_t q = 0; q < vq[k].size(); ++q)
            b.segment(static_cast<Eigen::Index>(sys.dofs.offset(k)), v.rows()) +=
                (vq[k].weights[q] * data.f(vq[k].points[q])) * v.col(static_cast<Eigen::Index>(q));
    }

    for (const auto& fl : lifts) {
        const Facet& f = m.facets[fl.facet];
        const FacetQuadRule& q = fq[f.id];
        const auto wf = detail::weights_of(q);
        Matrix blk;
        if (ldg) {
            blk = fp.eta[f.id] * (fl.trace.transpose() * wf.asDiagonal() * fl.trace);
        } else {
            blk = Matrix::Zero(static_cast<Eigen::Index>(fl.dofs.size()), static_cast<Eigen::Index>(fl.dofs.size()));
            for (const auto& lf : fl.fields) {
                const auto w = detail::weights_of(vq[lf.element]);
                Matrix kx, ky;
                kappa_apply(lf.lx, lf.ly, kx, ky);
                blk += fp.chi[f.id] * (lf.lx.transpose() * w.asDiagonal() * kx + lf.ly.transpose() * w.asDiagonal() * ky);
            }
        }
        for (std::size_t i = 0; i < fl.dofs.size(); ++i)
            for (std::size_t j = 0; j < fl.dofs.size(); ++j)
                a(static_cast<Eigen::Index>(fl.dofs[i]), static_cast<Eigen::Index>(fl.dofs[j])) +=
                    blk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

        if (f.kind != FacetKind::Dirichlet)
            continue;
        Vector gw(static_cast<Eigen::Index>(q.size()));
        for (std::size_t i = 0; i < q.size(); ++i)
            gw[static_cast<Eigen::Index>(i)] = q.weights[i] * data.g_dirichlet(q.points[i]);
        Vector rb;
        if (ldg) {
            rb = fp.eta[f.id] * (fl.trace.transpose() * gw);
        } else {
            // -int_F g_D kappa (grad v - chi L_D^F v) . n
            const index_t k = f.adjacent[0];
            const auto [gx, gy] = eval_basis_grad(make_basis_spec(m, k, degrees[k]), q.points);
            const auto& lf = fl.fields.front();
            const Matrix mf = lf.basis.eval(q.points);
            const Matrix lfx = (mf.transpose() * lf.cx).transpose(), lfy = (mf.transpose() * lf.cy).transpose();
            const Matrix vx = gx - fp.chi[f.id] * lfx, vy = gy - fp.chi[f.id] * lfy;
            const Point2 kn = kap.apply(f.normal);
            rb = -((kn.x * vx + kn.y * vy) * gw);
        }
        for (std::size_t i = 0; i < fl.dofs.size(); ++i)
            b[static_cast<Eigen::Index>(fl.dofs[i])] += rb[static_cast<Eigen::Index>(i)];
    }

    for (const Facet& f : m.facets) {
        if (f.kind != FacetKind::Neumann)
            continue;
        const index_t k = f.adjacent[0];
        b.segment(static_cast<Eigen::Index>(sys.dofs.offset(k)), sys.dofs.dim(k)) +=
            neumann_vector(f, make_basis_spec(m, k, degrees[k]), fq[f.id], data.g_neumann);
    }

    TripletBuffer buf;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0.0)
                buf.emplace_back(static_cast<long>(i), static_cast<long>(j), a(i, j));
    sys.A = triplets_to_csr(buf, n);
    sys.b = std::move(b);
    sys.assembly_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sys;
}

}  // namespace polydg
