#include "plstomo/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plstomo {

namespace {

void check_shapes(const SystemMatrix& A, const Sinogram& b, const RbfDictionary& dict,
                  const ShapeParams& params) {
    if (b.size() != A.rows())
        throw std::invalid_argument("solver: sinogram length " + std::to_string(b.size()) +
                                    " does not match matrix rows " + std::to_string(A.rows()));
    if (dict.pixel_count() != A.cols())
        throw std::invalid_argument("solver: dictionary pixel count " +
                                    std::to_string(dict.pixel_count()) +
                                    " does not match matrix columns " + std::to_string(A.cols()));
    if (params.alpha.size() != dict.n())
        throw std::invalid_argument("solver: alpha length " + std::to_string(params.alpha.size()) +
                                    " does not match dictionary size " + std::to_string(dict.n()));
}

void validate_options(const SolverOptions& opts) {
    if (opts.max_iters < 0)
        throw std::invalid_argument("solver: max_iters must be >= 0");
    if (opts.grad_tol && !(*opts.grad_tol > 0.0))
        throw std::invalid_argument("solver: grad_tol must be > 0");
    if (!(opts.rel_obj_tol > 0.0))
        throw std::invalid_argument("solver: rel_obj_tol must be > 0");
    if (!(opts.lm_damping_init > 0.0))
        throw std::invalid_argument("solver: lm_damping_init must be > 0");
    if (!(opts.line_search.c > 0.0))
        throw std::invalid_argument("solver: Armijo constant must be > 0");
    if (!(opts.line_search.shrink > 0.0 && opts.line_search.shrink < 1.0))
        throw std::invalid_argument("solver: Armijo shrink factor must lie in (0,1)");
    if (opts.line_search.max_backtracks < 0)
        throw std::invalid_argument("solver: max_backtracks must be >= 0");
}

constexpr int kStallPatience = 3; // consecutive stalled iterations before stopping

} // namespace

std::string to_string(StopReason reason) {
    switch (reason) {
    case StopReason::GradientTolerance: return "gradient_tolerance";
    case StopReason::ObjectiveStall: return "objective_stall";
    case StopReason::Stagnation: return "stagnation";
    case StopReason::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

double objective(const SystemMatrix& A, const Sinogram& b, const RbfDictionary& dict,
                 const ShapeParams& params) {
    check_shapes(A, b, dict, params);
    const Eigen::VectorXd u = synthesize_image(dict, params);
    return (A.weights * u - b.values).squaredNorm();
}

Eigen::VectorXd gradient(const SystemMatrix& A, const Sinogram& b, const RbfDictionary& dict,
                         const ShapeParams& params) {
    check_shapes(A, b, dict, params);
    const Eigen::VectorXd f = eval_levelset(dict, params.alpha);
    Eigen::VectorXd u(f.size());
    Eigen::VectorXd w(f.size());
    const double contrast = params.u_in - params.u_ex;
    for (Eigen::Index p = 0; p < f.size(); ++p) {
        const Heaviside h = smoothed_heaviside(f[p], params.eps);
        u[p] = params.u_ex + contrast * h.value;
        w[p] = contrast * h.delta;
    }
    const Eigen::VectorXd residual = A.weights * u - b.values;
    const Eigen::VectorXd back = A.weights.transpose() * residual; // A^T r
    return 2.0 * (dict.basis.transpose() * w.cwiseProduct(back));
}

std::optional<Eigen::VectorXd> solve_damped_normal(const Eigen::MatrixXd& jhat,
                                                   const Eigen::VectorXd& grad, double tau) {
    const Eigen::MatrixXd normal = jhat.transpose() * jhat;
    const Eigen::Index n = normal.rows();
    const double mu_floor = 1e-12 * normal.trace() / static_cast<double>(n);
    Eigen::MatrixXd damped = normal;
    damped.diagonal() += tau * normal.diagonal();
    damped.diagonal().array() += tau * mu_floor;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd step = ldlt.solve(-0.5 * grad);
    if (!step.allFinite()) return std::nullopt;
    return step;
}

Eigen::VectorXd gauss_newton_step(const SystemMatrix& A, const Sinogram& b,
                                  const RbfDictionary& dict, const ShapeParams& params,
                                  double tau) {
    check_shapes(A, b, dict, params);
    const Eigen::MatrixXd jhat = A.weights * shape_jacobian(dict, params); // M x n
    const Eigen::VectorXd grad = gradient(A, b, dict, params);

    double t = tau;
    for (int attempt = 0; attempt <= 10; ++attempt) {
        if (auto step = solve_damped_normal(jhat, grad, t)) return *step;
        t *= 10.0;
    }
    throw SingularSystemError("gauss_newton_step: damped normal system unsolvable after "
                              "escalating damping 10 times");
}

LineSearchResult line_search(const SystemMatrix& A, const Sinogram& b, const RbfDictionary& dict,
                             const ShapeParams& params, const Eigen::VectorXd& dalpha,
                             const ArmijoOptions& opts) {
    check_shapes(A, b, dict, params);
    const double f0 = objective(A, b, dict, params);
    const Eigen::VectorXd grad = gradient(A, b, dict, params);
    auto fval = [&](const Eigen::VectorXd& alpha) {
        ShapeParams trial = params;
        trial.alpha = alpha;
        return objective(A, b, dict, trial);
    };
    return armijo_backtrack(fval, params.alpha, f0, grad, dalpha, opts);
}

Eigen::VectorXd init_alpha(const RbfDictionary& dict, const InitSeed& seed) {
    const int n = dict.n();
    Eigen::VectorXd alpha(n);
    switch (seed.kind) {
    case InitSeed::Kind::CenteredCircle: {
        for (int i = 0; i < n; ++i)
            alpha[i] = seed.value - dict.centers[static_cast<std::size_t>(i)].norm();
        return alpha;
    }
    case InitSeed::Kind::Constant: {
        alpha.setConstant(seed.value);
        return alpha;
    }
    case InitSeed::Kind::FromAlpha: {
        if (seed.data.size() != n)
            throw std::invalid_argument("init_alpha: alpha length " +
                                        std::to_string(seed.data.size()) +
                                        " does not match dictionary size " + std::to_string(n));
        return seed.data;
    }
    case InitSeed::Kind::FromMask: {
        const ImageGrid& grid = dict.grid;
        if (seed.data.size() != grid.size())
            throw std::invalid_argument("init_alpha: mask length " +
                                        std::to_string(seed.data.size()) +
                                        " does not match grid size " + std::to_string(grid.size()));
        // +-1 map, blurred once with a clamped 3x3 box.
        Eigen::VectorXd signed_map(grid.size());
        for (Eigen::Index p = 0; p < signed_map.size(); ++p)
            signed_map[p] = seed.data[p] > 0.5 ? 1.0 : -1.0;
        Eigen::VectorXd blurred(grid.size());
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                double sum = 0.0;
                int count = 0;
                for (int dj = -1; dj <= 1; ++dj) {
                    for (int di = -1; di <= 1; ++di) {
                        const int ii = i + di, jj = j + dj;
                        if (ii < 0 || ii >= grid.nx || jj < 0 || jj >= grid.ny) continue;
                        sum += signed_map[grid.index(ii, jj)];
                        ++count;
                    }
                }
                blurred[grid.index(i, j)] = sum / count;
            }
        }
        for (int c = 0; c < n; ++c) {
            const Eigen::Vector2d& x = dict.centers[static_cast<std::size_t>(c)];
            int i = static_cast<int>(std::floor((x.x() - grid.origin.x()) / grid.pixel_size));
            int j = static_cast<int>(std::floor((x.y() - grid.origin.y()) / grid.pixel_size));
            i = std::clamp(i, 0, grid.nx - 1);
            j = std::clamp(j, 0, grid.ny - 1);
            alpha[c] = blurred[grid.index(i, j)];
        }
        return alpha;
    }
    }
    throw std::invalid_argument("init_alpha: unknown seed kind");
}

ReconstructionResult reconstruct(const SystemMatrix& A, const Sinogram& b,
                                 const RbfDictionary& dict, const SolverOptions& options) {
    validate_options(options);
    const double grad_tol = options.grad_tol.value_or(1e-6 * A.rows());

    const InitSeed seed = options.init.value_or(InitSeed::centered_circle(
        0.3 * std::min(dict.grid.extent_x(), dict.grid.extent_y())));

    ShapeParams params = make_shape_params(init_alpha(dict, seed), options.u_in, options.u_ex,
                                           options.eps);
    check_shapes(A, b, dict, params);

    SolverState state;
    state.tau = options.lm_damping_init;

    double f = objective(A, b, dict, params);
    if (!std::isfinite(f))
        throw SolverNumericalError("reconstruct: non-finite initial objective", state.trace);
    Eigen::VectorXd grad = gradient(A, b, dict, params);
    double grad_norm = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;

    state.trace.push_back({0, f, grad_norm, 0.0, state.tau, 0});

    StopReason reason = StopReason::MaxIterations;
    int stall_count = 0;

    for (int k = 1; k <= options.max_iters; ++k) {
        if (grad_norm < grad_tol) {
            reason = StopReason::GradientTolerance;
            break;
        }

        Eigen::VectorXd dalpha;
        try {
            dalpha = gauss_newton_step(A, b, dict, params, state.tau);
        } catch (const SingularSystemError& e) {
            throw SolverNumericalError(e.what(), state.trace);
        }

        const LineSearchResult ls = line_search(A, b, dict, params, dalpha, options.line_search);
        if (!ls.accepted) {
            reason = StopReason::Stagnation;
            break;
        }
        if (!std::isfinite(ls.objective))
            throw SolverNumericalError("reconstruct: non-finite objective at iteration " +
                                       std::to_string(k), state.trace);

        const double rel_decrease = (f - ls.objective) / std::max(f, 1e-300);
        stall_count = rel_decrease < options.rel_obj_tol ? stall_count + 1 : 0;

        params.alpha = ls.alpha;
        f = ls.objective;
        if (ls.backtracks == 0 && !ls.used_gradient_fallback)
            state.tau /= 3.0;
        else
            state.tau *= 2.0;

        grad = gradient(A, b, dict, params);
        grad_norm = grad.cwiseAbs().maxCoeff();
        state.iter = k;
        state.trace.push_back({k, f, grad_norm, ls.lambda, state.tau, ls.backtracks});

        if (stall_count >= kStallPatience) {
            reason = StopReason::ObjectiveStall;
            break;
        }
    }

    state.alpha = params.alpha;
    state.objective = f;
    state.gradient = grad;

    ReconstructionResult result;
    result.mask = binarize(dict, params);
    result.params = std::move(params);
    result.state = std::move(state);
    result.reason = reason;
    return result;
}

} // namespace plstomo
