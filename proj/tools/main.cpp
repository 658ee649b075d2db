#include "plstomo/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"plstomo: binary tomography via parametric level sets over a Gaussian RBF "
                 "dictionary, with a SIRT+Otsu baseline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string output_override;
    int jobs = 1;
    app.add_option("--config", config_path, "experiment config file (key = value lines)");
    app.add_option("--output", output_override, "override the config's output_dir");
    app.add_option("--jobs", jobs, "workers for batch runs (single runs use one process)")
        ->check(CLI::PositiveNumber);

    CLI::App* phantom_cmd = app.add_subcommand("phantom", "rasterize the configured phantom");
    CLI::App* project_cmd = app.add_subcommand("project", "forward-project the truth image");
    CLI::App* recon_cmd = app.add_subcommand("reconstruct", "run the level-set reconstruction");
    CLI::App* baseline_cmd = app.add_subcommand("baseline", "run the SIRT+Otsu baseline");
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "compare two mask images");

    std::string est_path, true_path;
    eval_cmd->add_option("estimate", est_path, "estimated mask PGM")->required();
    eval_cmd->add_option("truth", true_path, "ground-truth mask PGM")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (eval_cmd->parsed()) {
            plstomo::cmd_evaluate(est_path, true_path, output_override);
            return 0;
        }
        if (config_path.empty())
            throw plstomo::ConfigError("--config is required for this command");
        plstomo::ExperimentConfig cfg = plstomo::parse_config_file(config_path);
        if (!output_override.empty()) cfg.output_dir = output_override;

        if (phantom_cmd->parsed()) plstomo::cmd_phantom(cfg);
        else if (project_cmd->parsed()) plstomo::cmd_project(cfg);
        else if (recon_cmd->parsed()) plstomo::cmd_reconstruct(cfg);
        else if (baseline_cmd->parsed()) plstomo::cmd_baseline(cfg);
        return 0;
    } catch (const plstomo::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const plstomo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const plstomo::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
