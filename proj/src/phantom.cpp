#include "plstomo/phantom.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace plstomo {

namespace {

void check_radius(double r, const char* what) {
    if (r < 0.0) throw std::invalid_argument(std::string(what) + ": radius must be >= 0");
    if (!std::isfinite(r)) throw std::invalid_argument(std::string(what) + ": radius must be finite");
}

bool inside_disk(const Eigen::Vector2d& p, const Disk& d) {
    return (p - Eigen::Vector2d(d.cx, d.cy)).norm() < d.r;
}

} // namespace

PhantomSpec PhantomSpec::disk(double cx, double cy, double r) {
    check_radius(r, "disk");
    PhantomSpec spec;
    spec.kind = Kind::Disk;
    spec.disks = {{cx, cy, r}};
    return spec;
}

PhantomSpec PhantomSpec::two_disks() {
    PhantomSpec spec;
    spec.kind = Kind::TwoDisks;
    return spec;
}

PhantomSpec PhantomSpec::two_disks(Disk a, Disk b) {
    check_radius(a.r, "two-disks");
    check_radius(b.r, "two-disks");
    PhantomSpec spec;
    spec.kind = Kind::TwoDisks;
    spec.disks = {a, b};
    return spec;
}

PhantomSpec PhantomSpec::annulus(double r_in, double r_out) {
    if (r_in < 0.0) throw std::invalid_argument("annulus: r_in must be >= 0");
    if (!(r_out > r_in)) throw std::invalid_argument("annulus: r_out must exceed r_in");
    PhantomSpec spec;
    spec.kind = Kind::Annulus;
    spec.r_in = r_in;
    spec.r_out = r_out;
    return spec;
}

PhantomSpec PhantomSpec::blob_union(std::vector<Disk> disks) {
    if (disks.empty()) throw std::invalid_argument("blob-union: needs at least one disk");
    for (const Disk& d : disks) check_radius(d.r, "blob-union");
    PhantomSpec spec;
    spec.kind = Kind::BlobUnion;
    spec.disks = std::move(disks);
    return spec;
}

std::vector<Disk> default_two_disks(const ImageGrid& grid) {
    const double ext = std::min(grid.extent_x(), grid.extent_y());
    return {{-0.20 * ext, -0.14 * ext, 0.14 * ext}, {0.18 * ext, 0.16 * ext, 0.17 * ext}};
}

Phantom make_phantom(const PhantomSpec& spec, const ImageGrid& grid) {
    Phantom phantom;
    std::vector<Disk> disks = spec.disks;

    switch (spec.kind) {
    case PhantomSpec::Kind::Disk:
        phantom.name = "disk";
        break;
    case PhantomSpec::Kind::TwoDisks: {
        phantom.name = "two-disks";
        if (disks.empty()) {
            disks = default_two_disks(grid);
        } else if (disks.size() != 2) {
            throw std::invalid_argument("two-disks: expected exactly two disks");
        }
        break;
    }
    case PhantomSpec::Kind::Annulus:
        phantom.name = "annulus";
        break;
    case PhantomSpec::Kind::BlobUnion:
        phantom.name = "blob-union";
        if (disks.empty()) throw std::invalid_argument("blob-union: needs at least one disk");
        break;
    default:
        throw std::invalid_argument("make_phantom: unknown phantom kind");
    }

    phantom.mask = Eigen::VectorXd::Zero(grid.size());
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Eigen::Vector2d p = grid.pixel_center(i, j);
            bool in = false;
            if (spec.kind == PhantomSpec::Kind::Annulus) {
                const double d = p.norm();
                in = d >= spec.r_in && d < spec.r_out;
            } else {
                for (const Disk& disk : disks) {
                    if (inside_disk(p, disk)) {
                        in = true;
                        break;
                    }
                }
            }
            if (in) phantom.mask[grid.index(i, j)] = 1.0;
        }
    }
    return phantom;
}

} // namespace plstomo
