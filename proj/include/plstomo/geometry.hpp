#ifndef PLSTOMO_GEOMETRY_HPP
#define PLSTOMO_GEOMETRY_HPP

#include <Eigen/Core>
#include <vector>

namespace plstomo {

// Discrete image domain, centered at the physical origin. Pixel (i,j)
// covers [origin + (i,j)*ps, origin + (i+1,j+1)*ps); its center is
// origin + ((i+0.5), (j+0.5))*ps. Linear index p = j*nx + i.
struct ImageGrid {
    int nx = 0;
    int ny = 0;
    double pixel_size = 1.0;
    Eigen::Vector2d origin{0.0, 0.0}; // corner with smallest coordinates

    int size() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }

    Eigen::Vector2d pixel_center(int i, int j) const {
        return origin + Eigen::Vector2d((i + 0.5) * pixel_size, (j + 0.5) * pixel_size);
    }

    double extent_x() const { return nx * pixel_size; }
    double extent_y() const { return ny * pixel_size; }
};

// Parallel-beam acquisition. Rays are perpendicular to the detector at
// each angle; detector bins are centered on the rotation axis, bin d at
// offset (d - (n_det-1)/2) * det_spacing.
struct ScanGeometry {
    std::vector<double> angles; // radians, strictly increasing, in [0, 2*pi)
    int n_det = 0;
    double det_spacing = 1.0;

    int n_angles() const { return static_cast<int>(angles.size()); }
    int measurement_count() const { return n_angles() * n_det; }
    double det_offset(int d) const { return (d - 0.5 * (n_det - 1)) * det_spacing; }
};

ImageGrid make_grid(int nx, int ny, double pixel_size);

ScanGeometry make_geometry(std::vector<double> angles, int n_det, double det_spacing);

// count angles theta_k = range_start + k*(range_end - range_start)/count.
// Half-open: the endpoint is excluded (theta and theta+pi are redundant
// in parallel beam).
std::vector<double> uniform_angles(int count, double range_start, double range_end);

// uniform_angles with range_start = 0, for the limited-angle protocols.
std::vector<double> limited_angles(int count, double range_end);

// ceil(sqrt(2) * max(nx, ny)): enough bins to cover every pixel at every
// angle when det_spacing equals pixel_size.
int default_detector_count(const ImageGrid& grid);

} // namespace plstomo

#endif
