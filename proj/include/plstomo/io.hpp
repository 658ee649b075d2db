#ifndef PLSTOMO_IO_HPP
#define PLSTOMO_IO_HPP

#include "plstomo/errors.hpp"
#include "plstomo/projector.hpp"
#include "plstomo/solver.hpp"

#include <Eigen/Core>
#include <string>
#include <vector>

namespace plstomo {

struct PgmImage {
    int width = 0;
    int height = 0;
    Eigen::VectorXd values; // [0,1], layout matches ImageGrid indexing (p = j*width + i)
};

// Plain-text PGM (P2, maxval 255). Values must lie in [0,1]; samples are
// round(255*v). The top raster row holds the grid row with largest y.
void write_pgm(const Eigen::VectorXd& image, int width, int height, const std::string& path);

// Inverse of write_pgm, v = sample/255. Throws ParseError with the
// offending line on malformed input.
PgmImage read_pgm(const std::string& path);

// CSV with header "angle_index,det_index,value", one row per bin,
// angle-major, values with 17 significant digits (bit-exact round trip).
void write_sinogram_csv(const Sinogram& sino, const std::string& path);

Sinogram read_sinogram_csv(const std::string& path);

// CSV with header "i,j,value" over pixel coordinates, value in {0,1}.
void write_mask_csv(const Eigen::VectorXd& mask, int width, int height, const std::string& path);

// CSV with header "iter,objective,grad_norm,lambda,tau,backtracks".
void write_trace_csv(const std::vector<IterationRecord>& trace, const std::string& path);

struct MetricsRow {
    std::string experiment;
    std::string method;
    int views = 0;
    double angle_range = 0.0;
    double jaccard = 0.0;
    double pixel_error = 0.0;
    double sinogram_rmse = 0.0;
    int iters = 0;
    double seconds = 0.0;
};

// CSV with header "experiment,method,views,angle_range,jaccard,
// pixel_error,sinogram_rmse,iters,seconds" and one row per entry.
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

std::string format_metrics_row(const MetricsRow& row);

} // namespace plstomo

#endif
