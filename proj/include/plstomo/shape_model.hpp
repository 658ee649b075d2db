#ifndef PLSTOMO_SHAPE_MODEL_HPP
#define PLSTOMO_SHAPE_MODEL_HPP

#include "plstomo/geometry.hpp"

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace plstomo {

// Gaussian RBF dictionary on a coarse sub-grid of the image domain.
// basis(p, i) = exp(-beta * |x_p - x_i|^2) for pixel center x_p and
// RBF center x_i; beta defaults to 1/(sqrt(2)*sigma).
struct RbfDictionary {
    ImageGrid grid;
    std::vector<Eigen::Vector2d> centers;
    double sigma = 0.0;
    double beta = 0.0;
    Eigen::MatrixXd basis; // N x n, entries in (0, 1]

    int n() const { return static_cast<int>(centers.size()); }
    int pixel_count() const { return static_cast<int>(basis.rows()); }
};

// Level-set weights plus the two gray values and the Heaviside width.
struct ShapeParams {
    Eigen::VectorXd alpha;
    double u_in = 1.0;
    double u_ex = 0.0;
    double eps = 0.5;
};

struct Heaviside {
    double value; // H_eps(t), in (0, 1)
    double delta; // d/dt H_eps(t)
};

// Centers on a uniform sub-grid with the given spacing (in pixels),
// inset half a spacing from the border. The optional beta override
// replaces the default 1/(sqrt(2)*sigma).
RbfDictionary make_dictionary(const ImageGrid& grid, int center_spacing, double sigma,
                              std::optional<double> beta_override = std::nullopt);

// Validates eps > 0, u_in != u_ex, alpha finite.
ShapeParams make_shape_params(Eigen::VectorXd alpha, double u_in, double u_ex, double eps);

// Arctan-smoothed step: H_eps(t) = 1/2 * (1 + 2/pi * atan(t/eps)),
// delta_eps(t) = (1/pi) * eps / (eps^2 + t^2).
Heaviside smoothed_heaviside(double t, double eps);

// f = B * alpha.
Eigen::VectorXd eval_levelset(const RbfDictionary& dict, const Eigen::VectorXd& alpha);

// u_p = u_ex + (u_in - u_ex) * H_eps(f_p).
Eigen::VectorXd synthesize_image(const RbfDictionary& dict, const ShapeParams& params);

// Exact derivative of synthesize_image: J(p, i) = (u_in - u_ex) *
// delta_eps(f_p) * B(p, i).
Eigen::MatrixXd shape_jacobian(const RbfDictionary& dict, const ShapeParams& params);

// Hard-threshold readout: 1 where f >= 0 (interior; f = 0 goes to the
// + side), 0 elsewhere. Depends only on sign(f).
Eigen::VectorXd binarize(const RbfDictionary& dict, const ShapeParams& params);

} // namespace plstomo

#endif
