#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logstamp/cluster.hpp"
#include "logstamp/corpus.hpp"
#include "logstamp/encoder.hpp"
#include "logstamp/labeler.hpp"
#include "logstamp/parser.hpp"
#include "logstamp/tagger.hpp"

namespace logstamp {

// Resolved configuration for one end-to-end run. A master seed feeds the
// split, encoder, and tagger with stable derived sub-seeds.
struct PipelineConfig {
    TokenizerConfig tokenizer;
    EncoderConfig encoder;
    DbscanConfig dbscan;
    LabelerConfig labeler;
    TaggerConfig tagger;
    std::uint64_t seed = 0;

    void validate() const;

    // Stamp derived sub-seeds from `seed` into the component configs.
    void apply_seed(std::uint64_t master);

    std::uint64_t split_seed() const;
};

struct TrainedPipeline {
    EncoderModel encoder;
    TaggerModel tagger;
    std::vector<LabeledSentence> labeled;
    LabelStatistics label_stats;
    ClusterAssignment assignment;
};

// Offline workflow over a training corpus: encoder training, sentence
// embedding, density clustering, frequency pseudo-labeling, tagger training.
TrainedPipeline train_offline(const Dataset& train, const PipelineConfig& config);

// Parse every record of a dataset through a fresh-or-shared store, in order.
std::vector<ParseResult> parse_dataset(const EncoderModel& encoder, const TaggerModel& tagger,
                                       TemplateStore& store, const Dataset& dataset);

Partition truth_partition(const Dataset& dataset);

} // namespace logstamp
