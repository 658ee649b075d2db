#ifndef PLSTOMO_CONFIG_HPP
#define PLSTOMO_CONFIG_HPP

#include "plstomo/errors.hpp"
#include "plstomo/geometry.hpp"
#include "plstomo/phantom.hpp"
#include "plstomo/shape_model.hpp"
#include "plstomo/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace plstomo {

// Flat key-value experiment description. Optional fields resolve to
// grid/geometry-dependent defaults; see resolve() and the README key
// reference.
struct ExperimentConfig {
    std::string experiment_name = "experiment";

    int nx = 64;
    int ny = 64;
    double pixel_size = 1.0;

    std::optional<std::vector<double>> explicit_angles; // overrides count+range
    int n_angles = 4;
    double range_start = 0.0;
    double range_end = 3.14159265358979312; // pi
    std::optional<int> n_det;               // default ceil(sqrt(2)*max(nx,ny))
    std::optional<double> det_spacing;      // default pixel_size

    int center_spacing = 8;
    std::optional<double> sigma;            // default 1.5*center_spacing*pixel_size
    std::optional<double> beta_override;

    double eps = 0.5;

    int max_iters = 200;
    std::optional<double> grad_tol;         // default 1e-6 * M
    double rel_obj_tol = 1e-6;
    double lm_damping_init = 1e-3;
    double armijo_c = 1e-4;
    double armijo_shrink = 0.5;
    int max_backtracks = 30;
    std::string init_spec;                  // "circle:R" | "constant:V" | "mask:PATH"; empty = default circle
    double u_in = 1.0;
    double u_ex = 0.0;

    std::string phantom_kind;               // disk | two-disks | annulus | blob-union
    std::vector<double> phantom_params;

    double noise_sigma = 0.0;
    unsigned long long seed = 1;

    int baseline_iterations = 500;
    double baseline_relaxation = 1.0;

    std::string output_dir = "out";
};

// Parses `key = value` lines ('#' comments); rejects unknown keys and
// validates every present field.
ExperimentConfig parse_config_text(const std::string& text, const std::string& path_for_errors);
ExperimentConfig parse_config_file(const std::string& path);

ImageGrid config_grid(const ExperimentConfig& cfg);
ScanGeometry config_geometry(const ExperimentConfig& cfg);
RbfDictionary config_dictionary(const ExperimentConfig& cfg, const ImageGrid& grid);
SolverOptions config_solver_options(const ExperimentConfig& cfg);
PhantomSpec config_phantom(const ExperimentConfig& cfg);

// Angular span covered by the configured geometry (for metrics rows).
double config_angle_range(const ExperimentConfig& cfg);

// All keys with defaults materialized; re-parsing the dump reproduces
// the same resolved experiment bit-for-bit.
std::string dump_effective_config(const ExperimentConfig& cfg);

} // namespace plstomo

#endif
