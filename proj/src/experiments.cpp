#include "logstamp/experiments.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include "logstamp/errors.hpp"

namespace logstamp {

namespace {

using Clock = std::chrono::steady_clock;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// replay the whole dataset through a fresh store and score it
ExperimentReport score_replay(const Dataset& dataset, double fraction, std::uint64_t seed,
                              const PipelineConfig& config, const TrainedPipeline& pipeline,
                              std::size_t train_records, Clock::time_point start) {
    std::string joined;
    for (const auto& rec : dataset.records) {
        joined += rec.content;
        joined.push_back('\n');
    }
    std::istringstream lines(joined);
    TemplateStore store;
    std::vector<ParseResult> results;
    results.reserve(dataset.size());
    parse_stream(pipeline.encoder, pipeline.tagger, store, lines, config.tokenizer,
                 [&](const ParseResult& r) { results.push_back(r); });

    const Partition predicted = induced_partition(results);
    const Partition truth = truth_partition(dataset);

    ExperimentReport report;
    report.dataset = dataset.name;
    report.fraction = fraction;
    report.seed = seed;
    report.config = config;
    report.counts = pair_counts(predicted, truth);
    report.rand_index = rand_index(report.counts);
    report.num_templates_predicted = store.size();
    report.num_templates_truth = truth.num_groups();
    report.train_records = train_records;
    report.parsed_records = results.size();
    report.noise_fraction = pipeline.label_stats.noise_fraction;
    report.tagger_train_accuracy = pipeline.tagger.meta.train_accuracy;
    report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.timestamp = iso_timestamp();
    return report;
}

} // namespace

nlohmann::json config_to_json(const PipelineConfig& config) {
    std::string delims;
    for (char c : config.tokenizer.extra_delimiters) delims.push_back(c);
    return nlohmann::json{
        {"tokenizer",
         {{"extra_delimiters", delims}, {"lowercase", config.tokenizer.lowercase}}},
        {"encoder",
         {{"embed_dim", config.encoder.embed_dim},
          {"hidden_dim", config.encoder.hidden_dim},
          {"epochs", config.encoder.epochs},
          {"learning_rate", config.encoder.learning_rate},
          {"mask_probability", config.encoder.mask_probability},
          {"max_vocab", config.encoder.max_vocab},
          {"min_token_count", config.encoder.min_token_count},
          {"max_line_visits", config.encoder.max_line_visits},
          {"seed", config.encoder.seed}}},
        {"dbscan", {{"eps", config.dbscan.eps}, {"min_pts", config.dbscan.min_pts}}},
        {"labeler",
         {{"tau", config.labeler.tau},
          {"count_mode",
           config.labeler.count_mode == CountMode::Document ? "document" : "positional"}}},
        {"tagger",
         {{"architecture", tagger_arch_name(config.tagger.architecture)},
          {"hidden_dim", config.tagger.hidden_dim},
          {"epochs", config.tagger.epochs},
          {"learning_rate", config.tagger.learning_rate},
          {"seed", config.tagger.seed}}},
        {"seed", config.seed}};
}

nlohmann::json report_to_json(const ExperimentReport& report) {
    return nlohmann::json{{"dataset", report.dataset},
                          {"fraction", report.fraction},
                          {"seed", report.seed},
                          {"config", config_to_json(report.config)},
                          {"rand_index", report.rand_index},
                          {"pair_counts",
                           {{"tp", report.counts.tp},
                            {"tn", report.counts.tn},
                            {"fp", report.counts.fp},
                            {"fn", report.counts.fn}}},
                          {"num_templates_predicted", report.num_templates_predicted},
                          {"num_templates_truth", report.num_templates_truth},
                          {"train_records", report.train_records},
                          {"parsed_records", report.parsed_records},
                          {"noise_fraction", report.noise_fraction},
                          {"tagger_train_accuracy", report.tagger_train_accuracy},
                          {"runtime_seconds", report.runtime_seconds},
                          {"timestamp", report.timestamp}};
}

ExperimentReport run_online_experiment(const Dataset& dataset, double fraction,
                                       std::uint64_t seed, PipelineConfig config) {
    if (!dataset.labeled)
        throw_error(ErrorKind::Input,
                    "experiment requires a labeled dataset: " + dataset.name);
    config.apply_seed(seed);
    config.validate();

    const auto start = Clock::now();
    TrainTestSplit split = split_train(dataset, fraction, config.split_seed());
    TrainedPipeline pipeline = train_offline(split.train, config);
    return score_replay(dataset, fraction, seed, config, pipeline, split.train.size(), start);
}

ExperimentReport run_offline_experiment(const Dataset& dataset, PipelineConfig config) {
    return run_online_experiment(dataset, 1.0, config.seed, std::move(config));
}

std::vector<ExperimentReport> run_fraction_sweep(const Dataset& dataset,
                                                 const std::vector<double>& fractions,
                                                 std::uint64_t seed,
                                                 const PipelineConfig& config) {
    std::vector<ExperimentReport> reports;
    reports.reserve(fractions.size());
    for (double f : fractions) reports.push_back(run_online_experiment(dataset, f, seed, config));
    return reports;
}

std::vector<ExperimentReport> run_tagger_ablation(const Dataset& dataset, double fraction,
                                                  std::uint64_t seed, PipelineConfig config) {
    std::vector<ExperimentReport> reports;
    for (TaggerArch arch :
         {TaggerArch::RecurrentBidir, TaggerArch::RecurrentUnidir, TaggerArch::Convolutional}) {
        PipelineConfig variant = config;
        variant.tagger.architecture = arch;
        reports.push_back(run_online_experiment(dataset, fraction, seed, variant));
    }
    return reports;
}

ConfigSweepResult run_config_sweep(const Dataset& dataset, double fraction, std::uint64_t seed,
                                   const PipelineConfig& base,
                                   const std::vector<double>& eps_grid,
                                   const std::vector<double>& tau_grid) {
    if (!dataset.labeled)
        throw_error(ErrorKind::Input, "sweep requires a labeled dataset: " + dataset.name);
    if (eps_grid.empty() || tau_grid.empty())
        throw_error(ErrorKind::Parameter, "sweep grids must be non-empty");

    PipelineConfig seeded = base;
    seeded.apply_seed(seed);
    seeded.validate();

    TrainTestSplit split = split_train(dataset, fraction, seeded.split_seed());
    EncoderModel encoder = train_encoder(split.train, seeded.encoder);
    std::vector<std::vector<float>> points;
    points.reserve(split.train.size());
    for (const auto& rec : split.train.records)
        points.push_back(embed_sentence(encoder, rec.tokens, rec.id).vector);

    ConfigSweepResult result;
    for (double eps : eps_grid) {
        for (double tau : tau_grid) {
            PipelineConfig variant = seeded;
            variant.dbscan.eps = eps;
            variant.labeler.tau = tau;

            const auto start = Clock::now();
            TrainedPipeline pipeline;
            pipeline.encoder = encoder;
            pipeline.assignment = dbscan(points, variant.dbscan);
            pipeline.labeled =
                pseudo_label(split.train.records, pipeline.assignment, variant.labeler);
            if (pipeline.labeled.empty()) continue; // all noise at this eps, skip the combo
            pipeline.label_stats =
                label_statistics(pipeline.labeled, pipeline.assignment.noise_count());
            pipeline.tagger = train_tagger(pipeline.labeled, encoder, variant.tagger);

            result.reports.push_back(score_replay(dataset, fraction, seed, variant, pipeline,
                                                  split.train.size(), start));
        }
    }
    if (result.reports.empty())
        throw_error(ErrorKind::Input,
                    "config sweep: every combination left only noise clusters");
    for (std::size_t i = 1; i < result.reports.size(); ++i)
        if (result.reports[i].rand_index > result.reports[result.best_index].rand_index)
            result.best_index = i;
    return result;
}

} // namespace logstamp
