#include "plstomo/commands.hpp"

#include "plstomo/io.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

namespace plstomo {

namespace fs = std::filesystem;

namespace {

fs::path prepare_output(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::ofstream out(dir / "effective_config.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write effective config in " + cfg.output_dir);
    out << dump_effective_config(cfg);
    return dir;
}

PgmImage read_grid_image(const fs::path& path, const ImageGrid& grid, const char* role) {
    if (!fs::exists(path))
        throw ConfigError(std::string(role) + " image not found: " + path.string() +
                          " (run the producing command first)");
    PgmImage img = read_pgm(path.string());
    if (img.width != grid.nx || img.height != grid.ny)
        throw ConfigError(std::string(role) + " image " + path.string() + " is " +
                          std::to_string(img.width) + "x" + std::to_string(img.height) +
                          ", config grid is " + std::to_string(grid.nx) + "x" +
                          std::to_string(grid.ny));
    return img;
}

Sinogram read_config_sinogram(const fs::path& path, const ScanGeometry& geom) {
    if (!fs::exists(path))
        throw ConfigError("sinogram not found: " + path.string() +
                          " (run the project command first)");
    Sinogram sino = read_sinogram_csv(path.string());
    if (sino.n_angles != geom.n_angles() || sino.n_det != geom.n_det)
        throw ConfigError("sinogram " + path.string() + " is " + std::to_string(sino.n_angles) +
                          "x" + std::to_string(sino.n_det) + ", config geometry is " +
                          std::to_string(geom.n_angles()) + "x" + std::to_string(geom.n_det));
    return sino;
}

Eigen::VectorXd to_mask(const Eigen::VectorXd& values) {
    Eigen::VectorXd mask(values.size());
    for (Eigen::Index p = 0; p < values.size(); ++p) mask[p] = values[p] > 0.5 ? 1.0 : 0.0;
    return mask;
}

} // namespace

void cmd_phantom(const ExperimentConfig& cfg) {
    if (cfg.phantom_kind.empty())
        throw ConfigError("phantom command requires phantom.kind");
    const ImageGrid grid = config_grid(cfg);
    const Phantom phantom = make_phantom(config_phantom(cfg), grid);
    const fs::path dir = prepare_output(cfg);
    write_pgm(phantom.mask, grid.nx, grid.ny, (dir / "truth.pgm").string());
    write_mask_csv(phantom.mask, grid.nx, grid.ny, (dir / "truth_mask.csv").string());
    std::cout << "wrote " << (dir / "truth.pgm").string() << " (" << phantom.name << ", "
              << static_cast<long>(phantom.mask.sum()) << " foreground pixels)\n";
}

void cmd_project(const ExperimentConfig& cfg) {
    const ImageGrid grid = config_grid(cfg);
    const ScanGeometry geom = config_geometry(cfg);
    const fs::path dir = prepare_output(cfg);

    const PgmImage truth = read_grid_image(dir / "truth.pgm", grid, "truth");
    const SystemMatrix A = build_system_matrix(grid, geom);
    Sinogram sino = forward(A, truth.values);

    if (cfg.noise_sigma > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (Eigen::Index k = 0; k < sino.values.size(); ++k) sino.values[k] += noise(rng);
    }

    write_sinogram_csv(sino, (dir / "sinogram.csv").string());
    std::cout << "wrote " << (dir / "sinogram.csv").string() << " (" << sino.n_angles
              << " angles x " << sino.n_det << " bins)\n";
}

void cmd_reconstruct(const ExperimentConfig& cfg) {
    const ImageGrid grid = config_grid(cfg);
    const ScanGeometry geom = config_geometry(cfg);
    const fs::path dir = prepare_output(cfg);

    const Sinogram sino = read_config_sinogram(dir / "sinogram.csv", geom);
    const SystemMatrix A = build_system_matrix(grid, geom);
    const RbfDictionary dict = config_dictionary(cfg, grid);

    SolverOptions opts = config_solver_options(cfg);
    if (cfg.init_spec.rfind("mask:", 0) == 0) {
        const std::string mask_path = cfg.init_spec.substr(5);
        const PgmImage seed_img = read_grid_image(mask_path, grid, "init mask");
        opts.init = InitSeed::from_mask(seed_img.values);
    }

    const auto start = std::chrono::steady_clock::now();
    ReconstructionResult result;
    try {
        result = reconstruct(A, sino, dict, opts);
    } catch (const SolverNumericalError& e) {
        write_trace_csv(e.trace(), (dir / "trace.csv").string()); // flush before propagating
        throw;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_trace_csv(result.state.trace, (dir / "trace.csv").string());
    write_pgm(result.mask, grid.nx, grid.ny, (dir / "recon_mask.pgm").string());

    const Eigen::VectorXd soft = synthesize_image(dict, result.params);
    const double lo = std::min(cfg.u_in, cfg.u_ex), hi = std::max(cfg.u_in, cfg.u_ex);
    write_pgm(((soft.array() - lo) / (hi - lo)).matrix(), grid.nx, grid.ny,
              (dir / "recon_soft.pgm").string());

    std::cout << "reconstruct: " << result.state.iter << " iterations, objective "
              << result.state.objective << ", stop=" << to_string(result.reason) << "\n";

    const fs::path truth_path = dir / "truth.pgm";
    if (fs::exists(truth_path)) {
        const PgmImage truth = read_grid_image(truth_path, grid, "truth");
        const MetricReport report = compare(result.mask, to_mask(truth.values), A, sino);
        MetricsRow row;
        row.experiment = cfg.experiment_name;
        row.method = "pls";
        row.views = geom.n_angles();
        row.angle_range = config_angle_range(cfg);
        row.jaccard = report.jaccard;
        row.pixel_error = report.pixel_error_fraction;
        row.sinogram_rmse = report.sinogram_rmse;
        row.iters = result.state.iter;
        row.seconds = seconds;
        write_metrics_csv({row}, (dir / "metrics_pls.csv").string());
        std::cout << "metrics: jaccard=" << report.jaccard
                  << " pixel_error=" << report.pixel_error_fraction
                  << " sinogram_rmse=" << report.sinogram_rmse << "\n";
    }
}

void cmd_baseline(const ExperimentConfig& cfg) {
    const ImageGrid grid = config_grid(cfg);
    const ScanGeometry geom = config_geometry(cfg);
    const fs::path dir = prepare_output(cfg);

    const Sinogram sino = read_config_sinogram(dir / "sinogram.csv", geom);
    const SystemMatrix A = build_system_matrix(grid, geom);

    const auto start = std::chrono::steady_clock::now();
    const Eigen::VectorXd u = sirt(A, sino, cfg.baseline_iterations, cfg.baseline_relaxation);
    const Eigen::VectorXd mask = otsu_threshold(u);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_pgm(u, grid.nx, grid.ny, (dir / "baseline_sirt.pgm").string());
    write_pgm(mask, grid.nx, grid.ny, (dir / "baseline_mask.pgm").string());
    std::cout << "baseline: " << cfg.baseline_iterations << " SIRT iterations\n";

    const fs::path truth_path = dir / "truth.pgm";
    if (fs::exists(truth_path)) {
        const PgmImage truth = read_grid_image(truth_path, grid, "truth");
        const MetricReport report = compare(mask, to_mask(truth.values), A, sino);
        MetricsRow row;
        row.experiment = cfg.experiment_name;
        row.method = "sirt+otsu";
        row.views = geom.n_angles();
        row.angle_range = config_angle_range(cfg);
        row.jaccard = report.jaccard;
        row.pixel_error = report.pixel_error_fraction;
        row.sinogram_rmse = report.sinogram_rmse;
        row.iters = cfg.baseline_iterations;
        row.seconds = seconds;
        write_metrics_csv({row}, (dir / "metrics_sirt.csv").string());
        std::cout << "metrics: jaccard=" << report.jaccard
                  << " pixel_error=" << report.pixel_error_fraction
                  << " sinogram_rmse=" << report.sinogram_rmse << "\n";
    }
}

MetricReport cmd_evaluate(const std::string& est_path, const std::string& true_path,
                          const std::string& output_dir) {
    const PgmImage est = read_pgm(est_path);
    const PgmImage truth = read_pgm(true_path);
    if (est.width != truth.width || est.height != truth.height)
        throw ConfigError("evaluate: image sizes differ (" + std::to_string(est.width) + "x" +
                          std::to_string(est.height) + " vs " + std::to_string(truth.width) +
                          "x" + std::to_string(truth.height) + ")");

    const Eigen::VectorXd mask_est = to_mask(est.values);
    const Eigen::VectorXd mask_true = to_mask(truth.values);

    MetricReport report;
    report.jaccard = jaccard_index(mask_est, mask_true);
    long mismatched = 0;
    for (Eigen::Index p = 0; p < mask_est.size(); ++p)
        mismatched += (mask_est[p] > 0.5) != (mask_true[p] > 0.5) ? 1 : 0;
    report.pixel_error_fraction =
        static_cast<double>(mismatched) / static_cast<double>(mask_est.size());
    report.sinogram_rmse = std::numeric_limits<double>::quiet_NaN(); // no system matrix here

    MetricsRow row;
    row.experiment = est_path;
    row.method = "evaluate";
    row.jaccard = report.jaccard;
    row.pixel_error = report.pixel_error_fraction;
    row.sinogram_rmse = report.sinogram_rmse;

    std::cout << "experiment,method,views,angle_range,jaccard,pixel_error,sinogram_rmse,iters,seconds\n"
              << format_metrics_row(row) << "\n";
    if (!output_dir.empty()) {
        fs::create_directories(output_dir);
        write_metrics_csv({row}, (fs::path(output_dir) / "metrics_evaluate.csv").string());
    }
    return report;
}

} // namespace plstomo
