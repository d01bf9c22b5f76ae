#include <polydg/analysis.hpp>
#include <polydg/mesh_generators.hpp>

#include <gtest/gtest.h>

using namespace polydg;

namespace {

Mesh family(const std::string& name) {
    if (name == "cartesian")
        return build_cartesian(4, 4);
    if (name == "triangular")
        return build_triangular(4, 4);
    if (name == "voronoi")
        return build_voronoi(25, 10, 4);
    return agglomerate(build_triangular(8, 8), 12, 2);
}

}  // namespace

TEST(Solve, ParseSolverNames) {
    EXPECT_EQ(parse_solver("auto"), SolverKind::Auto);
    EXPECT_EQ(parse_solver("direct"), SolverKind::SparseDirect);
    EXPECT_EQ(parse_solver("pcg"), SolverKind::CG);
    EXPECT_THROW(parse_solver("gmres"), Error);
}

TEST(Solve, SolversAgree) {
    const Mesh m = build_voronoi(30, 10, 1);
    const DegreeVector p = uniform_degrees(m, 2);
    const ManufacturedSolution ms = sincos_solution();
    const AssembledSystem sys = assemble(m, p, make_facet_params(m, p, {}), make_problem(ms));
    SolveOptions opt;
    opt.kind = SolverKind::Dense;
    const DiscreteSolution dense = solve(sys, opt);
    opt.kind = SolverKind::SparseDirect;
    const DiscreteSolution direct = solve(sys, opt);
    opt.kind = SolverKind::CG;
    const DiscreteSolution cg = solve(sys, opt);
    EXPECT_TRUE(dense.converged);
    EXPECT_TRUE(direct.converged);
    EXPECT_TRUE(cg.converged);
    EXPECT_FALSE(dense.indefinite);
    EXPECT_FALSE(direct.indefinite);
    EXPECT_GT(cg.iterations, 0);
    EXPECT_LE((dense.u - direct.u).norm(), 1e-9 * dense.u.norm());
    EXPECT_LE((dense.u - cg.u).norm(), 1e-8 * dense.u.norm());
}

TEST(Solve, PatchTestReproducesLinears) {
    const ManufacturedSolution ms = linear_solution();
    for (const std::string fam : {"cartesian", "triangular", "voronoi", "agglomerated"}) {
        const Mesh m = family(fam);
        for (MethodKind mk : {MethodKind::CDG, MethodKind::BR2, MethodKind::LDG_w, MethodKind::LDG_f})
            for (int deg : {1, 2}) {
                FluxConfig cfg;
                cfg.method = mk;
                const DegreeVector p = uniform_degrees(m, deg);
                const FacetParams fp = make_facet_params(m, p, cfg);
                const AssembledSystem sys = assemble(m, p, fp, make_problem(ms));
                const DiscreteSolution s = solve(sys);
                EXPECT_LE(error_l2(m, sys.dofs, s.u, ms), 1e-9) << fam << " " << to_string(mk) << " p=" << deg;
                EXPECT_LE(error_cdg_norm(m, sys.dofs, fp, s.u, ms), 1e-8) << fam << " " << to_string(mk);
            }
    }
}

TEST(Solve, IndefiniteSystemIsFlagged) {
    // A symmetric matrix with one negative eigenvalue.
    const DofMap dofs(DegreeVector{1});
    TripletBuffer t{{0, 0, 2.0}, {1, 1, -1.0}, {2, 2, 3.0}, {0, 1, 0.5}, {1, 0, 0.5}};
    const SparseMatrix a = triplets_to_csr(t, 3);
    const Vector b = Vector::Ones(3);
    SolveOptions opt;
    opt.kind = SolverKind::Dense;
    EXPECT_TRUE(solve(a, b, dofs, opt).indefinite);
    opt.kind = SolverKind::SparseDirect;
    const DiscreteSolution s = solve(a, b, dofs, opt);
    EXPECT_TRUE(s.indefinite);
    EXPECT_LE(s.residual, 1e-12);
    opt.kind = SolverKind::CG;
    EXPECT_THROW(solve(a, b, dofs, opt), IndefiniteMatrixError);
}

TEST(Solve, SizeMismatchThrows) {
    const DofMap dofs(DegreeVector{1});
    const SparseMatrix a = triplets_to_csr(TripletBuffer{{0, 0, 1.0}}, 3);
    EXPECT_THROW(solve(a, Vector::Ones(2), dofs), Error);
}
