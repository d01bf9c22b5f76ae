#include <polydg/analysis.hpp>
#include <polydg/mesh_generators.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace polydg;

TEST(Analysis, L2ErrorOfProjectionIsSmallAndOfZeroIsNorm) {
    const Mesh m = build_cartesian(4, 4);
    const DofMap dofs(uniform_degrees(m, 2));
    const ScalarFunction u = [](Point2 x) { return x.x * x.y; };
    // ||xy||^2 on the unit square is 1/9.
    EXPECT_NEAR(error_l2(m, dofs, Vector::Zero(static_cast<Eigen::Index>(dofs.size())), u), 1.0 / 3.0, 1e-13);
    EXPECT_LE(error_l2(m, dofs, l2_project(m, dofs, u), u), 1e-13);
}

TEST(Analysis, CdgNormOfSmoothInterpolantIsGradientNorm) {
    // A continuous p=1 function has no jumps, so only the gradient part remains.
    const Mesh m = build_cartesian(3, 3);
    const DegreeVector p = uniform_degrees(m, 1);
    const DofMap dofs(p);
    const FacetParams fp = make_facet_params(m, p, {});
    ManufacturedSolution zero = linear_solution();
    zero.u = [](Point2) { return 0.0; };
    zero.grad = [](Point2) { return Point2{}; };
    const ScalarFunction lin = [](Point2 x) { return 2.0 * x.x + x.y; };
    const Vector uh = l2_project(m, dofs, lin);
    ManufacturedSolution same = zero;
    same.u = lin;
    same.grad = [](Point2) { return Point2{2.0, 1.0}; };
    EXPECT_LE(error_cdg_norm(m, dofs, fp, uh, same), 1e-10);
    // Against zero data the boundary liftings add to |grad|^2 = 5.
    const double e = error_cdg_norm(m, dofs, fp, uh, zero);
    EXPECT_GT(e, std::sqrt(5.0));
}

TEST(Analysis, LanczosMatchesDense) {
    const Mesh m = build_voronoi(60, 10, 8);
    const DegreeVector p = uniform_degrees(m, 2);
    const AssembledSystem sys = assemble(m, p, make_facet_params(m, p, {}), ProblemData{});
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(sys.A), Eigen::EigenvaluesOnly);
    EigenOptions opt;
    opt.dense_limit = 0;
    opt.tol = 1e-12;
    const double lmin = min_eigenvalue(sys.A, opt);
    const double lmax = max_eigenvalue(sys.A, opt);
    EXPECT_NEAR(lmin, es.eigenvalues()[0], 1e-7 * std::abs(es.eigenvalues()[0]));
    EXPECT_NEAR(lmax, es.eigenvalues().maxCoeff(), 1e-7 * es.eigenvalues().maxCoeff());
    const EigenEstimate pw = power_iteration(sys.A, 1e-8);
    EXPECT_TRUE(pw.converged);
    EXPECT_NEAR(pw.value, es.eigenvalues().maxCoeff(), 1e-5 * es.eigenvalues().maxCoeff());
    EXPECT_NEAR(condition_estimate(sys.A, opt), es.eigenvalues().maxCoeff() / es.eigenvalues()[0],
                1e-6 * es.eigenvalues().maxCoeff() / es.eigenvalues()[0]);
}

TEST(Analysis, LanczosFindsNegativeEigenvalue) {
    Matrix d = Matrix::Zero(50, 50);
    for (int i = 0; i < 50; ++i)
        d(i, i) = 1.0 + i;
    d(7, 7) = -0.25;
    TripletBuffer t;
    for (int i = 0; i < 50; ++i)
        t.emplace_back(i, i, d(i, i));
    const SparseMatrix a = triplets_to_csr(t, 50);
    EigenOptions opt;
    opt.dense_limit = 0;
    EXPECT_NEAR(min_eigenvalue(a, opt), -0.25, 1e-8);
    EXPECT_THROW(condition_estimate(a, opt), IndefiniteMatrixError);
}

TEST(Analysis, CoercivityAllMethods) {
    const Mesh m = agglomerate(build_triangular(8, 8), 12, 3);
    for (MethodKind mk : {MethodKind::CDG, MethodKind::BR2, MethodKind::LDG_w, MethodKind::LDG_f}) {
        FluxConfig cfg;
        cfg.method = mk;
        const DegreeVector p = uniform_degrees(m, 2);
        const AssembledSystem sys = assemble(m, p, make_facet_params(m, p, cfg), ProblemData{});
        EXPECT_GT(min_eigenvalue(sys.A), 0.0) << to_string(mk);
    }
}

TEST(Analysis, StencilCountsOnCartesian) {
    // 3x3 grid: corner 3 blocks, edge 4, centre 5 for BR2; total 4*3 + 4*4 + 5 = 33.
    const Mesh m = build_cartesian(3, 3);
    const DegreeVector p = uniform_degrees(m, 1);
    FluxConfig cfg;
    cfg.method = MethodKind::BR2;
    const AssembledSystem sys = assemble(m, p, make_facet_params(m, p, cfg), ProblemData{});
    const StencilStats st = stencil_stats(sys.A, sys.dofs);
    EXPECT_EQ(st.block_count, 33u);
    EXPECT_EQ(st.blocks_per_element.at(3), 4u);
    EXPECT_EQ(st.blocks_per_element.at(4), 4u);
    EXPECT_EQ(st.blocks_per_element.at(5), 1u);
    EXPECT_LE(st.nnz, 33u * 9u);
    const MatrixDiagnostics dg = diagnose(sys);
    EXPECT_EQ(dg.block_count, 33u);
    EXPECT_GT(dg.cond2, 1.0);
    EXPECT_LE(dg.symmetry_defect, 1e-13);
}
