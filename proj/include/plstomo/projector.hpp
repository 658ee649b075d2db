#ifndef PLSTOMO_PROJECTOR_HPP
#define PLSTOMO_PROJECTOR_HPP

#include "plstomo/geometry.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

namespace plstomo {

struct Ray {
    Eigen::Vector2d point; // any point on the line
    Eigen::Vector2d dir;   // unit direction
};

struct RaySegment {
    int pixel;     // linear pixel index
    double length; // Euclidean intersection length, > 0
};

// Sparse measurement matrix: entry (ray, pixel) is the ray-pixel
// intersection length. Rows are angle-major, row = a * n_det + d.
struct SystemMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> weights;
    int n_angles = 0;
    int n_det = 0;

    int rows() const { return static_cast<int>(weights.rows()); }
    int cols() const { return static_cast<int>(weights.cols()); }
};

// Projection data, angle-major then detector bin.
struct Sinogram {
    Eigen::VectorXd values;
    int n_angles = 0;
    int n_det = 0;

    int size() const { return static_cast<int>(values.size()); }
    double& at(int a, int d) { return values[a * n_det + d]; }
    double at(int a, int d) const { return values[a * n_det + d]; }
};

// Every pixel the ray's chord inside the grid box crosses, in ray order,
// with exact intersection lengths. A ray lying on a pixel seam is
// attributed to the pixel on the +normal side (greater index); a ray
// missing the grid yields an empty list.
std::vector<RaySegment> trace_ray(const ImageGrid& grid, const Ray& ray);

// Parallel-beam ray for one (angle, detector offset) pair: the line
// { s*(cos t, sin t) + u*(-sin t, cos t) : u real }.
Ray parallel_ray(double angle, double det_offset);

SystemMatrix build_system_matrix(const ImageGrid& grid, const ScanGeometry& geom);

Sinogram forward(const SystemMatrix& A, const Eigen::VectorXd& u);

Eigen::VectorXd adjoint(const SystemMatrix& A, const Eigen::VectorXd& r);

} // namespace plstomo

#endif
