#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "logstamp/eval.hpp"
#include "logstamp/pipeline.hpp"

namespace logstamp {

// One experiment outcome with full config provenance. `timestamp` and
// `runtime_seconds` carry wall-clock data; everything else is a pure
// function of (dataset, config, seed).
struct ExperimentReport {
    std::string dataset;
    double fraction = 1.0;
    std::uint64_t seed = 0;
    PipelineConfig config;

    double rand_index = 0.0;
    ConfusionCounts counts;
    std::size_t num_templates_predicted = 0;
    std::size_t num_templates_truth = 0;
    std::size_t train_records = 0;
    std::size_t parsed_records = 0;
    double noise_fraction = 0.0;
    double tagger_train_accuracy = 0.0;

    double runtime_seconds = 0.0;
    std::string timestamp;
};

nlohmann::json config_to_json(const PipelineConfig& config);
nlohmann::json report_to_json(const ExperimentReport& report);

// Full-data training, then parse everything and score against ground truth.
ExperimentReport run_offline_experiment(const Dataset& dataset, PipelineConfig config);

// Train on a sampled fraction, stream-parse the whole dataset, score.
ExperimentReport run_online_experiment(const Dataset& dataset, double fraction,
                                       std::uint64_t seed, PipelineConfig config);

// One report per fraction, isolated runs.
std::vector<ExperimentReport> run_fraction_sweep(const Dataset& dataset,
                                                 const std::vector<double>& fractions,
                                                 std::uint64_t seed,
                                                 const PipelineConfig& config);

// Same pipeline under each tagger architecture.
std::vector<ExperimentReport> run_tagger_ablation(const Dataset& dataset, double fraction,
                                                  std::uint64_t seed, PipelineConfig config);

struct ConfigSweepResult {
    std::vector<ExperimentReport> reports; // one per (eps, tau), eps-major order
    std::size_t best_index = 0;            // highest rand_index, first wins ties
};

// Grid search over DBSCAN eps and labeler tau. The encoder depends on
// neither, so it is trained once and shared; every report is identical to
// the standalone run_online_experiment at that combination.
ConfigSweepResult run_config_sweep(const Dataset& dataset, double fraction, std::uint64_t seed,
                                   const PipelineConfig& base,
                                   const std::vector<double>& eps_grid,
                                   const std::vector<double>& tau_grid);

} // namespace logstamp
