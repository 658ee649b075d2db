#include "plstomo/shape_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace plstomo {

RbfDictionary make_dictionary(const ImageGrid& grid, int center_spacing, double sigma,
                              std::optional<double> beta_override) {
    if (center_spacing < 1)
        throw std::invalid_argument("make_dictionary: center_spacing must be >= 1");
    if (!(sigma > 0.0))
        throw std::invalid_argument("make_dictionary: sigma must be > 0");

    const int count_x = grid.nx / center_spacing;
    const int count_y = grid.ny / center_spacing;
    if (count_x < 1 || count_y < 1)
        throw std::invalid_argument("make_dictionary: spacing " + std::to_string(center_spacing) +
                                    " produces zero centers on a " + std::to_string(grid.nx) +
                                    "x" + std::to_string(grid.ny) + " grid");

    RbfDictionary dict;
    dict.grid = grid;
    dict.sigma = sigma;
    dict.beta = beta_override.value_or(1.0 / (std::numbers::sqrt2 * sigma));
    if (!(dict.beta > 0.0))
        throw std::invalid_argument("make_dictionary: beta must be > 0");

    dict.centers.reserve(static_cast<std::size_t>(count_x) * static_cast<std::size_t>(count_y));
    const double ps = grid.pixel_size;
    for (int cy = 0; cy < count_y; ++cy) {
        for (int cx = 0; cx < count_x; ++cx) {
            dict.centers.emplace_back(
                grid.origin.x() + (cx * center_spacing + 0.5 * center_spacing) * ps,
                grid.origin.y() + (cy * center_spacing + 0.5 * center_spacing) * ps);
        }
    }

    const int N = grid.size();
    const int n = dict.n();
    dict.basis.resize(N, n);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Eigen::Vector2d p = grid.pixel_center(i, j);
            const int row = grid.index(i, j);
            for (int c = 0; c < n; ++c) {
                const double d2 = (p - dict.centers[static_cast<std::size_t>(c)]).squaredNorm();
                dict.basis(row, c) = std::exp(-dict.beta * d2);
            }
        }
    }
    return dict;
}

ShapeParams make_shape_params(Eigen::VectorXd alpha, double u_in, double u_ex, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("make_shape_params: eps must be > 0");
    if (u_in == u_ex)
        throw std::invalid_argument("make_shape_params: u_in must differ from u_ex");
    if (!alpha.allFinite())
        throw std::invalid_argument("make_shape_params: alpha must be finite");
    return ShapeParams{std::move(alpha), u_in, u_ex, eps};
}

Heaviside smoothed_heaviside(double t, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("smoothed_heaviside: eps must be > 0");
    const double inv_pi = std::numbers::inv_pi;
    Heaviside h;
    h.value = 0.5 * (1.0 + 2.0 * inv_pi * std::atan(t / eps));
    h.delta = inv_pi * eps / (eps * eps + t * t);
    return h;
}

Eigen::VectorXd eval_levelset(const RbfDictionary& dict, const Eigen::VectorXd& alpha) {
    if (alpha.size() != dict.n())
        throw std::invalid_argument("eval_levelset: alpha length " + std::to_string(alpha.size()) +
                                    " does not match dictionary size " + std::to_string(dict.n()));
    return dict.basis * alpha;
}

Eigen::VectorXd synthesize_image(const RbfDictionary& dict, const ShapeParams& params) {
    const Eigen::VectorXd f = eval_levelset(dict, params.alpha);
    Eigen::VectorXd u(f.size());
    for (Eigen::Index p = 0; p < f.size(); ++p)
        u[p] = params.u_ex + (params.u_in - params.u_ex) * smoothed_heaviside(f[p], params.eps).value;
    return u;
}

Eigen::MatrixXd shape_jacobian(const RbfDictionary& dict, const ShapeParams& params) {
    const Eigen::VectorXd f = eval_levelset(dict, params.alpha);
    Eigen::VectorXd w(f.size());
    const double contrast = params.u_in - params.u_ex;
    for (Eigen::Index p = 0; p < f.size(); ++p)
        w[p] = contrast * smoothed_heaviside(f[p], params.eps).delta;
    return w.asDiagonal() * dict.basis;
}

Eigen::VectorXd binarize(const RbfDictionary& dict, const ShapeParams& params) {
    const Eigen::VectorXd f = eval_levelset(dict, params.alpha);
    Eigen::VectorXd mask(f.size());
    for (Eigen::Index p = 0; p < f.size(); ++p)
        mask[p] = f[p] >= 0.0 ? 1.0 : 0.0;
    return mask;
}

} // namespace plstomo
