#include "plstomo/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace plstomo {

ImageGrid make_grid(int nx, int ny, double pixel_size) {
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("make_grid: pixel counts must be >= 1, got " +
                                    std::to_string(nx) + "x" + std::to_string(ny));
    if (!(pixel_size > 0.0))
        throw std::invalid_argument("make_grid: pixel_size must be > 0");
    ImageGrid grid;
    grid.nx = nx;
    grid.ny = ny;
    grid.pixel_size = pixel_size;
    grid.origin = Eigen::Vector2d(-0.5 * nx * pixel_size, -0.5 * ny * pixel_size);
    return grid;
}

ScanGeometry make_geometry(std::vector<double> angles, int n_det, double det_spacing) {
    if (angles.empty())
        throw std::invalid_argument("make_geometry: angle list must be non-empty");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        if (!(angles[k] >= 0.0 && angles[k] < two_pi))
            throw std::invalid_argument("make_geometry: angle " + std::to_string(k) +
                                        " outside [0, 2*pi)");
        if (k > 0 && !(angles[k] > angles[k - 1]))
            throw std::invalid_argument("make_geometry: angles must be strictly increasing");
    }
    if (n_det < 1)
        throw std::invalid_argument("make_geometry: n_det must be >= 1");
    if (!(det_spacing > 0.0))
        throw std::invalid_argument("make_geometry: det_spacing must be > 0");
    ScanGeometry geom;
    geom.angles = std::move(angles);
    geom.n_det = n_det;
    geom.det_spacing = det_spacing;
    return geom;
}

std::vector<double> uniform_angles(int count, double range_start, double range_end) {
    if (count < 1)
        throw std::invalid_argument("uniform_angles: count must be >= 1");
    if (!(range_end > range_start))
        throw std::invalid_argument("uniform_angles: empty angular range");
    std::vector<double> angles(static_cast<std::size_t>(count));
    const double step = (range_end - range_start) / count;
    for (int k = 0; k < count; ++k)
        angles[static_cast<std::size_t>(k)] = range_start + k * step;
    return angles;
}

std::vector<double> limited_angles(int count, double range_end) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (!(range_end > 0.0 && range_end <= two_pi))
        throw std::invalid_argument("limited_angles: range_end must lie in (0, 2*pi]");
    return uniform_angles(count, 0.0, range_end);
}

int default_detector_count(const ImageGrid& grid) {
    return static_cast<int>(std::ceil(std::numbers::sqrt2 * std::max(grid.nx, grid.ny)));
}

} // namespace plstomo
