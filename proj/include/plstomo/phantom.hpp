#ifndef PLSTOMO_PHANTOM_HPP
#define PLSTOMO_PHANTOM_HPP

#include "plstomo/geometry.hpp"

#include <Eigen/Core>
#include <string>
#include <vector>

namespace plstomo {

struct Disk {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
};

// Binary phantom catalog: one disk, two disks, an annulus, or a union of
// disks. Coordinates and radii are in physical units.
struct PhantomSpec {
    enum class Kind { Disk, TwoDisks, Annulus, BlobUnion };

    Kind kind = Kind::Disk;
    std::vector<Disk> disks; // Disk: 1 entry; TwoDisks: 0 (defaults) or 2; BlobUnion: >= 1
    double r_in = 0.0;       // Annulus only
    double r_out = 0.0;

    static PhantomSpec disk(double cx, double cy, double r);
    static PhantomSpec two_disks();                 // default layout scaled to the grid
    static PhantomSpec two_disks(Disk a, Disk b);
    static PhantomSpec annulus(double r_in, double r_out);
    static PhantomSpec blob_union(std::vector<Disk> disks);
};

struct Phantom {
    std::string name;
    Eigen::VectorXd mask; // length N, values in {0, 1}
};

// Layout used by two_disks() when no disks are given, scaled to the grid.
std::vector<Disk> default_two_disks(const ImageGrid& grid);

// Pixel-center rasterization: a pixel is 1 iff its center lies inside
// the shape. Deterministic for fixed inputs.
Phantom make_phantom(const PhantomSpec& spec, const ImageGrid& grid);

} // namespace plstomo

#endif
