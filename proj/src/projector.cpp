#include "plstomo/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace plstomo {

namespace {

constexpr double kParallelEps = 1e-14; // direction component treated as axis-parallel
constexpr double kMinSegment = 1e-12;  // drop shorter slivers (corner grazes)

// Clip the infinite line point + t*dir against one slab [lo, hi].
// Returns false when the line misses the slab entirely.
bool clip_slab(double p, double d, double lo, double hi, double& t_enter, double& t_exit) {
    if (std::abs(d) < kParallelEps) {
        return p >= lo && p <= hi;
    }
    double ta = (lo - p) / d;
    double tb = (hi - p) / d;
    if (ta > tb) std::swap(ta, tb);
    t_enter = std::max(t_enter, ta);
    t_exit = std::min(t_exit, tb);
    return true;
}

} // namespace

std::vector<RaySegment> trace_ray(const ImageGrid& grid, const Ray& ray) {
    const double nrm = ray.dir.norm();
    if (std::abs(nrm - 1.0) > 1e-9)
        throw std::invalid_argument("trace_ray: direction must be a unit vector");

    const double ps = grid.pixel_size;
    const double x0 = grid.origin.x(), x1 = x0 + grid.extent_x();
    const double y0 = grid.origin.y(), y1 = y0 + grid.extent_y();

    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    if (!clip_slab(ray.point.x(), ray.dir.x(), x0, x1, t_enter, t_exit)) return {};
    if (!clip_slab(ray.point.y(), ray.dir.y(), y0, y1, t_enter, t_exit)) return {};
    if (!(t_exit - t_enter > kMinSegment)) return {};

    // Crossing parameters of all interior grid lines plus the chord ends.
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(grid.nx + grid.ny + 2));
    ts.push_back(t_enter);
    ts.push_back(t_exit);
    if (std::abs(ray.dir.x()) >= kParallelEps) {
        for (int k = 1; k < grid.nx; ++k) {
            const double t = (x0 + k * ps - ray.point.x()) / ray.dir.x();
            if (t > t_enter && t < t_exit) ts.push_back(t);
        }
    }
    if (std::abs(ray.dir.y()) >= kParallelEps) {
        for (int k = 1; k < grid.ny; ++k) {
            const double t = (y0 + k * ps - ray.point.y()) / ray.dir.y();
            if (t > t_enter && t < t_exit) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());

    std::vector<RaySegment> segments;
    segments.reserve(ts.size());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double len = ts[k + 1] - ts[k];
        if (len <= kMinSegment) continue;
        const Eigen::Vector2d mid = ray.point + 0.5 * (ts[k] + ts[k + 1]) * ray.dir;
        const int i = static_cast<int>(std::floor((mid.x() - x0) / ps));
        const int j = static_cast<int>(std::floor((mid.y() - y0) / ps));
        // Seam rays floor onto the +normal side; the far edges land outside.
        if (i < 0 || i >= grid.nx || j < 0 || j >= grid.ny) continue;
        segments.push_back({grid.index(i, j), len});
    }
    return segments;
}

Ray parallel_ray(double angle, double det_offset) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Ray{Eigen::Vector2d(det_offset * c, det_offset * s), Eigen::Vector2d(-s, c)};
}

SystemMatrix build_system_matrix(const ImageGrid& grid, const ScanGeometry& geom) {
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(geom.measurement_count()) *
                    static_cast<std::size_t>(grid.nx + grid.ny));

    for (int a = 0; a < geom.n_angles(); ++a) {
        for (int d = 0; d < geom.n_det; ++d) {
            const Ray ray = parallel_ray(geom.angles[static_cast<std::size_t>(a)],
                                         geom.det_offset(d));
            const int row = a * geom.n_det + d;
            for (const RaySegment& seg : trace_ray(grid, ray))
                entries.emplace_back(row, seg.pixel, seg.length);
        }
    }

    SystemMatrix A;
    A.n_angles = geom.n_angles();
    A.n_det = geom.n_det;
    A.weights.resize(geom.measurement_count(), grid.size());
    A.weights.setFromTriplets(entries.begin(), entries.end());
    A.weights.makeCompressed();
    return A;
}

Sinogram forward(const SystemMatrix& A, const Eigen::VectorXd& u) {
    if (u.size() != A.cols())
        throw std::invalid_argument("forward: image length " + std::to_string(u.size()) +
                                    " does not match matrix columns " + std::to_string(A.cols()));
    Sinogram sino;
    sino.n_angles = A.n_angles;
    sino.n_det = A.n_det;
    sino.values = A.weights * u;
    return sino;
}

Eigen::VectorXd adjoint(const SystemMatrix& A, const Eigen::VectorXd& r) {
    if (r.size() != A.rows())
        throw std::invalid_argument("adjoint: residual length " + std::to_string(r.size()) +
                                    " does not match matrix rows " + std::to_string(A.rows()));
    return A.weights.transpose() * r;
}

} // namespace plstomo
