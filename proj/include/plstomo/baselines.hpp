#ifndef PLSTOMO_BASELINES_HPP
#define PLSTOMO_BASELINES_HPP

#include "plstomo/projector.hpp"

#include <Eigen/Core>

namespace plstomo {

struct MetricReport {
    double jaccard = 0.0;
    double pixel_error_fraction = 0.0;
    double sinogram_rmse = 0.0;
};

// Simultaneous iterative reconstruction with inverse row/column-sum
// weights, clamped to [0,1] after every sweep.
Eigen::VectorXd sirt(const SystemMatrix& A, const Sinogram& b, int iterations, double relaxation);

// Between-class-variance threshold over a 256-bin histogram of u's value
// range. A constant image yields the all-background mask.
Eigen::VectorXd otsu_threshold(const Eigen::VectorXd& u);

double jaccard_index(const Eigen::VectorXd& mask_a, const Eigen::VectorXd& mask_b);

MetricReport compare(const Eigen::VectorXd& mask_est, const Eigen::VectorXd& mask_true,
                     const SystemMatrix& A, const Sinogram& b);

} // namespace plstomo

#endif
