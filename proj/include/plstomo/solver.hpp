#ifndef PLSTOMO_SOLVER_HPP
#define PLSTOMO_SOLVER_HPP

#include "plstomo/errors.hpp"
#include "plstomo/projector.hpp"
#include "plstomo/shape_model.hpp"

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace plstomo {

struct ArmijoOptions {
    double c = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 30;
};

// Seed shape for the initial weights, sampled at the RBF centers.
// FromAlpha bypasses collocation and sets the weights directly (used by
// the self-consistency experiments).
struct InitSeed {
    enum class Kind { CenteredCircle, Constant, FromMask, FromAlpha };

    Kind kind = Kind::CenteredCircle;
    double value = 0.0;   // radius or constant
    Eigen::VectorXd data; // FromMask: length-N binary image; FromAlpha: length-n weights

    static InitSeed centered_circle(double radius) { return {Kind::CenteredCircle, radius, {}}; }
    static InitSeed constant(double v) { return {Kind::Constant, v, {}}; }
    static InitSeed from_mask(Eigen::VectorXd m) { return {Kind::FromMask, 0.0, std::move(m)}; }
    static InitSeed from_alpha(Eigen::VectorXd a) { return {Kind::FromAlpha, 0.0, std::move(a)}; }
};

struct SolverOptions {
    int max_iters = 200;
    std::optional<double> grad_tol;  // stop when |grad|_inf < grad_tol; default 1e-6 * M
    double rel_obj_tol = 1e-6;       // stop after 3 consecutive stalls below this
    double lm_damping_init = 1e-3;
    ArmijoOptions line_search;
    std::optional<InitSeed> init;    // default: centered circle, radius 0.3 * min extent
    double u_in = 1.0;
    double u_ex = 0.0;
    double eps = 0.5;
};

struct IterationRecord {
    int iter;
    double objective;
    double grad_norm; // infinity norm
    double lambda;
    double tau;
    int backtracks;
};

struct SolverState {
    Eigen::VectorXd alpha;
    double objective = 0.0;
    Eigen::VectorXd gradient;
    int iter = 0;
    double tau = 0.0;
    std::vector<IterationRecord> trace; // length iter + 1
};

enum class StopReason { GradientTolerance, ObjectiveStall, Stagnation, MaxIterations };

std::string to_string(StopReason reason);

struct ReconstructionResult {
    ShapeParams params;
    Eigen::VectorXd mask;
    SolverState state;
    StopReason reason = StopReason::MaxIterations;
};

struct LineSearchResult {
    bool accepted = false;
    double lambda = 0.0;
    Eigen::VectorXd alpha;
    double objective = 0.0;
    int backtracks = 0;
    bool used_gradient_fallback = false;
};

// NumericalError that carries the per-iteration trace accumulated before
// the abort, so callers can flush it.
class SolverNumericalError : public NumericalError {
public:
    SolverNumericalError(const std::string& what, std::vector<IterationRecord> trace)
        : NumericalError(what), trace_(std::move(trace)) {}
    const std::vector<IterationRecord>& trace() const { return trace_; }

private:
    std::vector<IterationRecord> trace_;
};

// |A u(alpha) - b|^2
double objective(const SystemMatrix& A, const Sinogram& b, const RbfDictionary& dict,
                 const ShapeParams& params);

// 2 J_u^T A^T (A u - b), assembled through adjoint applications.
Eigen::VectorXd gradient(const SystemMatrix& A, const Sinogram& b, const RbfDictionary& dict,
                         const ShapeParams& params);

// One damped Gauss-Newton solve: (J^T J + tau diag(J^T J) + tau mu I) d = -g/2
// with mu = 1e-12 trace(J^T J)/n. Returns nullopt when the factorization
// fails or the solution is non-finite.
std::optional<Eigen::VectorXd> solve_damped_normal(const Eigen::MatrixXd& jhat,
                                                   const Eigen::VectorXd& grad, double tau);

// Candidate step at the current iterate; escalates tau (x10, up to 10
// times) on solve failure before giving up with SingularSystemError.
Eigen::VectorXd gauss_newton_step(const SystemMatrix& A, const Sinogram& b,
                                  const RbfDictionary& dict, const ShapeParams& params,
                                  double tau);

// Armijo backtracking from lambda = 1 along dalpha, falling back to the
// negative gradient when dalpha is not a descent direction or runs out
// of backtracks. accepted = false signals stagnation.
template <class Objective>
LineSearchResult armijo_backtrack(Objective&& fval, const Eigen::VectorXd& alpha0, double f0,
                                  const Eigen::VectorXd& grad, const Eigen::VectorXd& dalpha,
                                  const ArmijoOptions& opts) {
    auto attempt = [&](const Eigen::VectorXd& dir, bool fallback) -> LineSearchResult {
        LineSearchResult res;
        res.used_gradient_fallback = fallback;
        const double slope = grad.dot(dir);
        if (!(slope < 0.0)) return res;
        double lambda = 1.0;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
            const Eigen::VectorXd candidate = alpha0 + lambda * dir;
            const double fc = fval(candidate);
            if (fc <= f0 + opts.c * lambda * slope) {
                res.accepted = true;
                res.lambda = lambda;
                res.alpha = candidate;
                res.objective = fc;
                res.backtracks = bt;
                return res;
            }
            lambda *= opts.shrink;
        }
        return res;
    };

    LineSearchResult res = attempt(dalpha, false);
    if (res.accepted) return res;
    return attempt(-grad, true);
}

// Backtracking on the tomographic objective.
LineSearchResult line_search(const SystemMatrix& A, const Sinogram& b, const RbfDictionary& dict,
                             const ShapeParams& params, const Eigen::VectorXd& dalpha,
                             const ArmijoOptions& opts);

// Collocation initialization alpha_i = f_seed(x_i).
Eigen::VectorXd init_alpha(const RbfDictionary& dict, const InitSeed& seed);

// Full damped Gauss-Newton loop with Armijo line search.
ReconstructionResult reconstruct(const SystemMatrix& A, const Sinogram& b,
                                 const RbfDictionary& dict, const SolverOptions& options);

} // namespace plstomo

#endif
