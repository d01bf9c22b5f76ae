#pragma once

#include <polydg/local_ops.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace polydg {

struct Hessian2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
};

/// Exact solution with analytic gradient and Hessian; f follows from kappa.
struct ManufacturedSolution {
    std::string name;
    std::function<double(Point2)> u;
    std::function<Point2(Point2)> grad;
    std::function<Hessian2(Point2)> hessian;

    /// -div(kappa grad u) for a constant tensor.
    double forcing(Point2 x, const DiffusionTensor& k) const {
        const Hessian2 h = hessian(x);
        return -(k.xx * h.xx + 2.0 * k.xy * h.xy + k.yy * h.yy);
    }
};

inline ManufacturedSolution sincos_solution() {
    using std::numbers::pi;
    ManufacturedSolution ms;
    ms.name = "sincos";
    ms.u = [](Point2 x) { return std::sin(2 * pi * x.x) * std::cos(2 * pi * x.y); };
    ms.grad = [](Point2 x) {
        return Point2{2 * pi * std::cos(2 * pi * x.x) * std::cos(2 * pi * x.y),
                      -2 * pi * std::sin(2 * pi * x.x) * std::sin(2 * pi * x.y)};
    };
    ms.hessian = [](Point2 x) {
        const double s = std::sin(2 * pi * x.x), c = std::cos(2 * pi * x.x);
        const double sy = std::sin(2 * pi * x.y), cy = std::cos(2 * pi * x.y);
        const double k2 = 4 * pi * pi;
        return Hessian2{-k2 * s * cy, -k2 * c * sy, -k2 * s * cy};
    };
    return ms;
}

/// tanh(-20 (x^2 + y^2 - 0.8)): steep front on the circle of radius sqrt(0.8).
inline ManufacturedSolution tanh_front_solution() {
    ManufacturedSolution ms;
    ms.name = "tanh-front";
    ms.u = [](Point2 x) { return std::tanh(-20.0 * (x.x * x.x + x.y * x.y - 0.8)); };
    ms.grad = [](Point2 x) {
        const double t = std::tanh(-20.0 * (x.x * x.x + x.y * x.y - 0.8));
        const double d = 1.0 - t * t;
        return Point2{-40.0 * x.x * d, -40.0 * x.y * d};
    };
    ms.hessian = [](Point2 x) {
        const double t = std::tanh(-20.0 * (x.x * x.x + x.y * x.y - 0.8));
        const double d = 1.0 - t * t;
        const double sx = -40.0 * x.x, sy = -40.0 * x.y;
        return Hessian2{-2.0 * t * d * sx * sx - 40.0 * d, -2.0 * t * d * sx * sy, -2.0 * t * d * sy * sy - 40.0 * d};
    };
    return ms;
}

inline ManufacturedSolution linear_solution() {
    ManufacturedSolution ms;
    ms.name = "linear";
    ms.u = [](Point2 x) { return 0.3 + 1.7 * x.x - 0.6 * x.y; };
    ms.grad = [](Point2) { return Point2{1.7, -0.6}; };
    ms.hessian = [](Point2) { return Hessian2{}; };
    return ms;
}

inline std::vector<std::string> solution_names() { return {"sincos", "tanh-front", "linear"}; }

inline ManufacturedSolution solution_by_name(const std::string& name) {
    if (name == "sincos" || name == "MS1")
        return sincos_solution();
    if (name == "tanh-front" || name == "tanh" || name == "MS2")
        return tanh_front_solution();
    if (name == "linear" || name == "MS3")
        return linear_solution();
    throw Error("unknown manufactured solution \"" + name + "\" (expected sincos, tanh-front or linear)");
}

/// Data for the model problem whose exact solution is ms.
inline ProblemData make_problem(const ManufacturedSolution& ms, const DiffusionTensor& kappa = {}) {
    ProblemData d;
    d.kappa = kappa;
    d.f = [ms, kappa](Point2 x) { return ms.forcing(x, kappa); };
    d.g_dirichlet = ms.u;
    d.g_neumann = [ms, kappa](Point2 x, Point2 n) { return dot(kappa.apply(ms.grad(x)), n); };
    return d;
}

/// Largest deviation of f from a central-difference -div(kappa grad u) at the given points.
inline double forcing_fd_defect(const ManufacturedSolution& ms, const DiffusionTensor& k, std::span<const Point2> pts,
                                double delta = 1e-4) {
    double worst = 0.0;
    for (Point2 x : pts) {
        const Point2 ex{delta, 0.0}, ey{0.0, delta};
        const Point2 fx = k.apply(ms.grad(x + ex)) - k.apply(ms.grad(x - ex));
        const Point2 fy = k.apply(ms.grad(x + ey)) - k.apply(ms.grad(x - ey));
        const double div = (fx.x + fy.y) / (2.0 * delta);
        worst = std::max(worst, std::abs(-div - ms.forcing(x, k)));
    }
    return worst;
}

/// Largest deviation of grad u from central differences of u.
inline double gradient_fd_defect(const ManufacturedSolution& ms, std::span<const Point2> pts, double delta = 1e-5) {
    double worst = 0.0;
    for (Point2 x : pts) {
        const Point2 ex{delta, 0.0}, ey{0.0, delta};
        const Point2 g{(ms.u(x + ex) - ms.u(x - ex)) / (2 * delta), (ms.u(x + ey) - ms.u(x - ey)) / (2 * delta)};
        worst = std::max(worst, norm(g - ms.grad(x)));
    }
    return worst;
}

}  // namespace polydg
