#include "logstamp/pipeline.hpp"

#include "logstamp/errors.hpp"
#include "logstamp/rng.hpp"

namespace logstamp {

void PipelineConfig::validate() const {
    encoder.validate();
    dbscan.validate();
    labeler.validate();
    tagger.validate();
}

void PipelineConfig::apply_seed(std::uint64_t master) {
    seed = master;
    encoder.seed = derive_seed(master, 2);
    tagger.seed = derive_seed(master, 3);
}

std::uint64_t PipelineConfig::split_seed() const { return derive_seed(seed, 1); }

TrainedPipeline train_offline(const Dataset& train, const PipelineConfig& config) {
    config.validate();
    if (train.empty()) throw_error(ErrorKind::Input, "train_offline: empty training corpus");

    TrainedPipeline pipeline;
    pipeline.encoder = train_encoder(train, config.encoder);

    std::vector<std::vector<float>> points;
    points.reserve(train.size());
    for (const auto& rec : train.records)
        points.push_back(embed_sentence(pipeline.encoder, rec.tokens, rec.id).vector);

    pipeline.assignment = dbscan(points, config.dbscan);
    pipeline.labeled = pseudo_label(train.records, pipeline.assignment, config.labeler);
    if (pipeline.labeled.empty())
        throw_error(ErrorKind::Input,
                    "train_offline: clustering marked every record as noise; relax eps/min_pts");
    pipeline.label_stats =
        label_statistics(pipeline.labeled, pipeline.assignment.noise_count());
    pipeline.tagger = train_tagger(pipeline.labeled, pipeline.encoder, config.tagger);
    return pipeline;
}

std::vector<ParseResult> parse_dataset(const EncoderModel& encoder, const TaggerModel& tagger,
                                       TemplateStore& store, const Dataset& dataset) {
    std::vector<ParseResult> results;
    results.reserve(dataset.size());
    for (const auto& rec : dataset.records) {
        auto result = parse_line(encoder, tagger, store, rec);
        if (result) results.push_back(std::move(*result));
    }
    return results;
}

Partition truth_partition(const Dataset& dataset) {
    if (!dataset.labeled)
        throw_error(ErrorKind::Input, "dataset " + dataset.name + " has no ground-truth labels");
    Partition partition;
    partition.groups.reserve(dataset.size());
    for (const auto& rec : dataset.records) partition.groups.emplace(rec.id, *rec.truth_group);
    return partition;
}

} // namespace logstamp
