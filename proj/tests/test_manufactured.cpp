#include <polydg/manufactured.hpp>

#include <gtest/gtest.h>

#include <vector>

using namespace polydg;

namespace {

std::vector<Point2> sample_points() {
    std::vector<Point2> pts;
    for (int i = 1; i < 8; ++i)
        for (int j = 1; j < 8; ++j)
            pts.push_back({i / 8.0 + 0.013 * j, j / 8.0 - 0.007 * i});
    return pts;
}

}  // namespace

TEST(Manufactured, NamesAndAliases) {
    for (const std::string& n : solution_names())
        EXPECT_EQ(solution_by_name(n).name, n);
    EXPECT_EQ(solution_by_name("MS1").name, "sincos");
    EXPECT_EQ(solution_by_name("tanh").name, "tanh-front");
    EXPECT_EQ(solution_by_name("MS3").name, "linear");
    EXPECT_THROW(solution_by_name("cubic"), Error);
}

TEST(Manufactured, GradientMatchesFiniteDifferences) {
    const auto pts = sample_points();
    for (const std::string& n : solution_names())
        EXPECT_LE(gradient_fd_defect(solution_by_name(n), pts, 1e-6), 1e-6) << n;
}

TEST(Manufactured, ForcingMatchesFiniteDifferences) {
    const auto pts = sample_points();
    // The tanh front has derivatives of order 1e4; compare relative to that scale.
    const std::vector<DiffusionTensor> tensors{{}, {2.0, 0.5, 1.0}};
    for (const DiffusionTensor& k : tensors) {
        EXPECT_LE(forcing_fd_defect(sincos_solution(), k, pts, 1e-5), 1e-6);
        EXPECT_LE(forcing_fd_defect(linear_solution(), k, pts), 1e-8);
        EXPECT_LE(forcing_fd_defect(tanh_front_solution(), k, pts, 1e-5), 1e-6 * 1e4);
    }
}

TEST(Manufactured, KnownValues) {
    const auto s = sincos_solution();
    EXPECT_NEAR(s.u({0.25, 0.0}), 1.0, 1e-15);
    EXPECT_NEAR(s.u({0.25, 0.5}), -1.0, 1e-15);
    EXPECT_NEAR(s.forcing({0.25, 0.0}, {}), 8.0 * std::numbers::pi * std::numbers::pi, 1e-10);
    const auto t = tanh_front_solution();
    EXPECT_NEAR(t.u({std::sqrt(0.8), 0.0}), 0.0, 1e-14);
    EXPECT_NEAR(t.u({0.0, 0.0}), std::tanh(16.0), 1e-15);
}

TEST(Manufactured, ProblemDataUsesTensor) {
    const auto s = sincos_solution();
    const DiffusionTensor k{2.0, 0.5, 1.0};
    const ProblemData d = make_problem(s, k);
    const Point2 x{0.31, 0.77}, n{0.6, 0.8};
    EXPECT_DOUBLE_EQ(d.f(x), s.forcing(x, k));
    EXPECT_DOUBLE_EQ(d.g_dirichlet(x), s.u(x));
    EXPECT_NEAR(d.g_neumann(x, n), dot(k.apply(s.grad(x)), n), 1e-14);
}
