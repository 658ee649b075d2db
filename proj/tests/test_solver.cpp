#include "plstomo/solver.hpp"

#include "plstomo/baselines.hpp"
#include "plstomo/phantom.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace plstomo;

namespace {

constexpr double kPi = std::numbers::pi;

struct TestSystem {
    ImageGrid grid;
    ScanGeometry geom;
    SystemMatrix A;
    RbfDictionary dict;
};

TestSystem small_system(int n_pixels = 16, int n_views = 2, int spacing = 4) {
    TestSystem sys;
    sys.grid = make_grid(n_pixels, n_pixels, 1.0);
    sys.geom = make_geometry(uniform_angles(n_views, 0.0, kPi),
                             default_detector_count(sys.grid), 1.0);
    sys.A = build_system_matrix(sys.grid, sys.geom);
    sys.dict = make_dictionary(sys.grid, spacing, 1.5 * spacing);
    return sys;
}

// 1x1 grid, single ray, single RBF center: everything reduces to scalars.
TestSystem scalar_system() {
    TestSystem sys;
    sys.grid = make_grid(1, 1, 1.0);
    sys.geom = make_geometry({0.0}, 1, 1.0);
    sys.A = build_system_matrix(sys.grid, sys.geom);
    sys.dict = make_dictionary(sys.grid, 1, 1.0);
    return sys;
}

Eigen::VectorXd random_alpha(int n, unsigned seed, double scale = 2.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, scale);
    Eigen::VectorXd alpha(n);
    for (int k = 0; k < n; ++k) alpha[k] = dist(rng);
    return alpha;
}

} // namespace

TEST_CASE("objective at an exact-fit point is zero") {
    const TestSystem sys = small_system();
    const ShapeParams params =
        make_shape_params(random_alpha(sys.dict.n(), 1), 1.0, 0.0, 0.5);
    const Sinogram b = forward(sys.A, synthesize_image(sys.dict, params));
    CHECK(objective(sys.A, b, sys.dict, params) == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("objective against a zero matrix is the data norm") {
    const TestSystem sys = small_system();
    SystemMatrix zero = sys.A;
    zero.weights.setZero();
    Sinogram b;
    b.n_angles = sys.geom.n_angles();
    b.n_det = sys.geom.n_det;
    b.values = Eigen::VectorXd::Constant(sys.A.rows(), 0.5);
    const ShapeParams params =
        make_shape_params(Eigen::VectorXd::Zero(sys.dict.n()), 1.0, 0.0, 0.5);
    CHECK(objective(zero, b, sys.dict, params) ==
          doctest::Approx(b.values.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("scalar objective by direct arithmetic") {
    const TestSystem sys = scalar_system();
    // alpha = 0 gives u = H(0) = 0.5; residual = 0.5 - 1 = -0.5
    Sinogram b;
    b.n_angles = 1;
    b.n_det = 1;
    b.values = Eigen::VectorXd::Constant(1, 1.0);
    const ShapeParams params = make_shape_params(Eigen::VectorXd::Zero(1), 1.0, 0.0, 0.5);
    CHECK(objective(sys.A, b, sys.dict, params) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("gradient vanishes at zero residual") {
    const TestSystem sys = small_system();
    const ShapeParams params =
        make_shape_params(random_alpha(sys.dict.n(), 2), 1.0, 0.0, 0.5);
    const Sinogram b = forward(sys.A, synthesize_image(sys.dict, params));
    CHECK(gradient(sys.A, b, sys.dict, params).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient matches central finite differences") {
    const TestSystem sys = small_system(16, 2, 4);
    REQUIRE(sys.dict.n() == 16);
    const Phantom truth = make_phantom(PhantomSpec::disk(1.0, -2.0, 5.0), sys.grid);
    const Sinogram b = forward(sys.A, truth.mask);

    const double h = 1e-6;
    for (unsigned draw = 0; draw < 5; ++draw) {
        const Eigen::VectorXd alpha = random_alpha(sys.dict.n(), 100 + draw);
        const ShapeParams params = make_shape_params(alpha, 1.0, 0.0, 0.5);
        const Eigen::VectorXd g = gradient(sys.A, b, sys.dict, params);

        double worst = 0.0;
        for (int c = 0; c < sys.dict.n(); ++c) {
            ShapeParams plus = params, minus = params;
            plus.alpha[c] += h;
            minus.alpha[c] -= h;
            const double fd = (objective(sys.A, b, sys.dict, plus) -
                               objective(sys.A, b, sys.dict, minus)) /
                              (2.0 * h);
            worst = std::max(worst, std::abs(g[c] - fd) / (1.0 + std::abs(g[c])));
        }
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("scalar gradient by the hand chain rule") {
    const TestSystem sys = scalar_system();
    Sinogram b;
    b.n_angles = 1;
    b.n_det = 1;
    b.values = Eigen::VectorXd::Constant(1, 0.9);

    const double alpha = 0.3, eps = 0.5, a00 = sys.A.weights.coeff(0, 0);
    const double basis = sys.dict.basis(0, 0); // = 1, pixel center on the RBF center
    const ShapeParams params = make_shape_params(Eigen::VectorXd::Constant(1, alpha), 1.0, 0.0, eps);

    const Heaviside h = smoothed_heaviside(alpha * basis, eps);
    const double expected = 2.0 * (a00 * h.value - 0.9) * a00 * h.delta * basis;
    CHECK(gradient(sys.A, b, sys.dict, params)[0] == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("damped normal solve reaches the least-squares solution as tau -> 0") {
    // Linear test seam: residual J alpha - y, gradient 2 J^T (J alpha - y).
    std::mt19937 rng(31);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd J(12, 5);
    Eigen::VectorXd y(12), alpha0(5);
    for (Eigen::Index i = 0; i < J.rows(); ++i)
        for (Eigen::Index j = 0; j < J.cols(); ++j) J(i, j) = dist(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = dist(rng);
    for (Eigen::Index i = 0; i < alpha0.size(); ++i) alpha0[i] = dist(rng);

    const Eigen::VectorXd grad = 2.0 * J.transpose() * (J * alpha0 - y);
    const auto step = solve_damped_normal(J, grad, 1e-14);
    REQUIRE(step.has_value());

    const Eigen::VectorXd solution = J.colPivHouseholderQr().solve(y); // oracle
    CHECK(((alpha0 + *step) - solution).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("gauss-newton step is zero at zero gradient") {
    const TestSystem sys = small_system();
    const ShapeParams params =
        make_shape_params(random_alpha(sys.dict.n(), 4), 1.0, 0.0, 0.5);
    const Sinogram b = forward(sys.A, synthesize_image(sys.dict, params));
    const Eigen::VectorXd step = gauss_newton_step(sys.A, b, sys.dict, params, 1e-3);
    CHECK(step.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gauss-newton step scalar formula for n = 1") {
    const TestSystem sys = scalar_system();
    Sinogram b;
    b.n_angles = 1;
    b.n_det = 1;
    b.values = Eigen::VectorXd::Constant(1, 0.9);
    const ShapeParams params = make_shape_params(Eigen::VectorXd::Constant(1, 0.3), 1.0, 0.0, 0.5);

    const double tau = 1e-3;
    const Eigen::VectorXd g = gradient(sys.A, b, sys.dict, params);
    const Eigen::MatrixXd jhat = sys.A.weights * shape_jacobian(sys.dict, params);
    const double jtj = jhat(0, 0) * jhat(0, 0);
    const double expected = -0.5 * g[0] / (jtj * (1.0 + tau) + tau * 1e-12 * jtj);

    const Eigen::VectorXd step = gauss_newton_step(sys.A, b, sys.dict, params, tau);
    CHECK(step[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("armijo accepts the full step on an exact quadratic") {
    const ArmijoOptions opts;
    auto f = [](const Eigen::VectorXd& a) { return a[0] * a[0]; };
    Eigen::VectorXd alpha0 = Eigen::VectorXd::Constant(1, 1.0);
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(1, 2.0);
    Eigen::VectorXd dalpha = Eigen::VectorXd::Constant(1, -1.0);
    const LineSearchResult res = armijo_backtrack(f, alpha0, 1.0, grad, dalpha, opts);
    CHECK(res.accepted);
    CHECK(res.lambda == 1.0);
    CHECK(res.backtracks == 0);
    CHECK(res.objective == doctest::Approx(0.0));
}

TEST_CASE("armijo rejects an overshooting step and halves") {
    // f(a) = a^4 at a = 1 with step -2: f(-1) = 1 fails, f(0) = 0 passes.
    const ArmijoOptions opts;
    auto f = [](const Eigen::VectorXd& a) { return std::pow(a[0], 4); };
    Eigen::VectorXd alpha0 = Eigen::VectorXd::Constant(1, 1.0);
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(1, 4.0);
    Eigen::VectorXd dalpha = Eigen::VectorXd::Constant(1, -2.0);
    const LineSearchResult res = armijo_backtrack(f, alpha0, 1.0, grad, dalpha, opts);
    CHECK(res.accepted);
    CHECK(res.lambda == 0.5);
    CHECK(res.backtracks == 1);
    CHECK(res.objective == doctest::Approx(0.0));
}

TEST_CASE("armijo falls back to the negative gradient") {
    const ArmijoOptions opts;
    auto f = [](const Eigen::VectorXd& a) { return a[0] * a[0]; };
    Eigen::VectorXd alpha0 = Eigen::VectorXd::Constant(1, 1.0);
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(1, 2.0);
    Eigen::VectorXd uphill = Eigen::VectorXd::Constant(1, 1.0); // ascent direction
    const LineSearchResult res = armijo_backtrack(f, alpha0, 1.0, grad, uphill, opts);
    CHECK(res.accepted);
    CHECK(res.used_gradient_fallback);
    CHECK(res.objective < 1.0);
}

TEST_CASE("line search signals stagnation at a zero-residual point") {
    const TestSystem sys = small_system();
    const ShapeParams params =
        make_shape_params(random_alpha(sys.dict.n(), 5), 1.0, 0.0, 0.5);
    const Sinogram b = forward(sys.A, synthesize_image(sys.dict, params));
    const Eigen::VectorXd dalpha = Eigen::VectorXd::Zero(sys.dict.n());
    const LineSearchResult res = line_search(sys.A, b, sys.dict, params, dalpha,
                                             ArmijoOptions{});
    CHECK(!res.accepted);
}

TEST_CASE("init_alpha seed kinds") {
    const ImageGrid grid = make_grid(64, 64, 1.0);
    const RbfDictionary dict = make_dictionary(grid, 8, 12.0);

    const Eigen::VectorXd constant = init_alpha(dict, InitSeed::constant(-1.0));
    CHECK(constant.minCoeff() == -1.0);
    CHECK(constant.maxCoeff() == -1.0);
    const ShapeParams cparams = make_shape_params(constant, 1.0, 0.0, 0.5);
    CHECK(binarize(dict, cparams).maxCoeff() == 0.0); // empty initial mask

    const Eigen::VectorXd ones =
        init_alpha(dict, InitSeed::from_mask(Eigen::VectorXd::Ones(grid.size())));
    CHECK(ones.minCoeff() == 1.0);
    CHECK(ones.maxCoeff() == 1.0);

    Eigen::VectorXd direct(dict.n());
    direct.setLinSpaced(dict.n(), -1.0, 1.0);
    CHECK((init_alpha(dict, InitSeed::from_alpha(direct)) - direct).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(init_alpha(dict, InitSeed::from_mask(Eigen::VectorXd::Ones(7))),
                    std::invalid_argument);
    CHECK_THROWS_AS(init_alpha(dict, InitSeed::from_alpha(Eigen::VectorXd::Ones(7))),
                    std::invalid_argument);
    InitSeed bogus;
    bogus.kind = static_cast<InitSeed::Kind>(99);
    CHECK_THROWS_AS(init_alpha(dict, bogus), std::invalid_argument);
}

TEST_CASE("circle seed binarizes to a disk up to one center spacing") {
    const ImageGrid grid = make_grid(64, 64, 1.0);
    const RbfDictionary dict = make_dictionary(grid, 8, 12.0);
    const double radius = 14.0;
    const Eigen::VectorXd alpha = init_alpha(dict, InitSeed::centered_circle(radius));
    const Eigen::VectorXd mask =
        binarize(dict, make_shape_params(alpha, 1.0, 0.0, 0.5));
    const Phantom ideal = make_phantom(PhantomSpec::disk(0.0, 0.0, radius), grid);

    const double band = 8.0 * grid.pixel_size; // one center spacing
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int p = grid.index(i, j);
            if ((mask[p] > 0.5) != (ideal.mask[p] > 0.5)) {
                const double dist_to_boundary = std::abs(grid.pixel_center(i, j).norm() - radius);
                CHECK(dist_to_boundary <= band);
            }
        }
}

TEST_CASE("reconstruct with max_iters = 0 returns the initialization") {
    const TestSystem sys = small_system();
    const Phantom truth = make_phantom(PhantomSpec::disk(0.0, 0.0, 5.0), sys.grid);
    const Sinogram b = forward(sys.A, truth.mask);

    SolverOptions opts;
    opts.max_iters = 0;
    opts.init = InitSeed::centered_circle(5.0);
    const ReconstructionResult res = reconstruct(sys.A, b, sys.dict, opts);

    const Eigen::VectorXd expected = init_alpha(sys.dict, InitSeed::centered_circle(5.0));
    CHECK((res.state.alpha - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(res.state.trace.size() == 1);
    CHECK(res.state.iter == 0);
    CHECK(res.reason == StopReason::MaxIterations);
}

TEST_CASE("inverse-crime recovery from a perturbed start") {
    const TestSystem sys = small_system(16, 4, 4);
    const Eigen::VectorXd alpha_star = random_alpha(sys.dict.n(), 77, 3.0);
    const ShapeParams star = make_shape_params(alpha_star, 1.0, 0.0, 0.5);
    const Sinogram b = forward(sys.A, synthesize_image(sys.dict, star));

    std::mt19937 rng(78);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    Eigen::VectorXd alpha0 = alpha_star;
    for (Eigen::Index k = 0; k < alpha0.size(); ++k) alpha0[k] *= 1.0 + noise(rng);

    SolverOptions opts;
    opts.init = InitSeed::from_alpha(alpha0);
    const ReconstructionResult res = reconstruct(sys.A, b, sys.dict, opts);

    CHECK(res.state.objective <= 1e-8 * b.values.squaredNorm());
    const Eigen::VectorXd mask_star = binarize(sys.dict, star);
    CHECK(jaccard_index(res.mask, mask_star) >= 0.99);
}

TEST_CASE("accepted objectives are non-increasing") {
    const TestSystem sys = small_system(16, 3, 4);
    const Phantom truth = make_phantom(PhantomSpec::disk(1.0, 1.0, 5.0), sys.grid);
    const Sinogram b = forward(sys.A, truth.mask);

    SolverOptions opts;
    opts.max_iters = 60;
    const ReconstructionResult res = reconstruct(sys.A, b, sys.dict, opts);
    REQUIRE(res.state.trace.size() >= 2);
    for (std::size_t k = 1; k < res.state.trace.size(); ++k)
        CHECK(res.state.trace[k].objective <= res.state.trace[k - 1].objective);
    CHECK(static_cast<int>(res.state.trace.size()) == res.state.iter + 1);
}

TEST_CASE("reconstruct is deterministic") {
    const TestSystem sys = small_system(16, 2, 4);
    const Phantom truth = make_phantom(PhantomSpec::disk(-1.0, 2.0, 4.0), sys.grid);
    const Sinogram b = forward(sys.A, truth.mask);

    SolverOptions opts;
    opts.max_iters = 25;
    const ReconstructionResult r1 = reconstruct(sys.A, b, sys.dict, opts);
    const ReconstructionResult r2 = reconstruct(sys.A, b, sys.dict, opts);
    REQUIRE(r1.state.trace.size() == r2.state.trace.size());
    for (std::size_t k = 0; k < r1.state.trace.size(); ++k) {
        CHECK(r1.state.trace[k].objective == r2.state.trace[k].objective);
        CHECK(r1.state.trace[k].grad_norm == r2.state.trace[k].grad_norm);
        CHECK(r1.state.trace[k].lambda == r2.state.trace[k].lambda);
        CHECK(r1.state.trace[k].tau == r2.state.trace[k].tau);
    }
    CHECK((r1.state.alpha - r2.state.alpha).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaling data and weights by a power of two leaves the mask unchanged") {
    const TestSystem sys = small_system(16, 3, 4);
    const Phantom truth = make_phantom(PhantomSpec::disk(0.5, -1.5, 5.0), sys.grid);
    const Sinogram b = forward(sys.A, truth.mask);

    SolverOptions opts;
    opts.max_iters = 15;
    opts.grad_tol = 1e-30; // keep the iteration count scale independent
    const ReconstructionResult base = reconstruct(sys.A, b, sys.dict, opts);

    const double c = 4.0;
    SystemMatrix scaled_A = sys.A;
    scaled_A.weights = scaled_A.weights * c;
    Sinogram scaled_b = b;
    scaled_b.values *= c;
    const ReconstructionResult scaled = reconstruct(scaled_A, scaled_b, sys.dict, opts);

    CHECK((scaled.mask - base.mask).cwiseAbs().maxCoeff() == 0.0);
    CHECK(scaled.state.objective == doctest::Approx(c * c * base.state.objective)
                                        .epsilon(1e-12));
}

TEST_CASE("non-finite data aborts with a numerical error carrying the trace") {
    const TestSystem sys = small_system();
    Sinogram b = forward(sys.A, Eigen::VectorXd::Ones(sys.A.cols()));
    b.values[0] = std::numeric_limits<double>::quiet_NaN();
    SolverOptions opts;
    CHECK_THROWS_AS(reconstruct(sys.A, b, sys.dict, opts), SolverNumericalError);
}
