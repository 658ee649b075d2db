#ifndef PLSTOMO_COMMANDS_HPP
#define PLSTOMO_COMMANDS_HPP

#include "plstomo/baselines.hpp"
#include "plstomo/config.hpp"

#include <string>

namespace plstomo {

// Experiment pipeline steps behind the CLI subcommands. Each writes its
// outputs plus an effective-config dump under cfg.output_dir.

void cmd_phantom(const ExperimentConfig& cfg);   // truth.pgm, truth_mask.csv
void cmd_project(const ExperimentConfig& cfg);   // sinogram.csv
void cmd_reconstruct(const ExperimentConfig& cfg); // recon_mask.pgm, recon_soft.pgm, trace.csv, metrics_pls.csv
void cmd_baseline(const ExperimentConfig& cfg);  // baseline_sirt.pgm, baseline_mask.pgm, metrics_sirt.csv

// Prints a metrics row for two mask images; writes metrics_evaluate.csv
// when output_dir is non-empty.
MetricReport cmd_evaluate(const std::string& est_path, const std::string& true_path,
                          const std::string& output_dir = "");

} // namespace plstomo

#endif
