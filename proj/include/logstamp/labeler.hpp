#pragma once

#include <string>
#include <vector>

#include "logstamp/cluster.hpp"
#include "logstamp/corpus.hpp"

namespace logstamp {

enum class WordLabel { Template, Variable };

inline const char* word_label_name(WordLabel label) {
    return label == WordLabel::Template ? "T" : "V";
}

enum class CountMode { Document, Positional };

struct LabelerConfig {
    double tau = 0.9; // frequency-ratio threshold: TEMPLATE iff freq/|C| >= tau
    CountMode count_mode = CountMode::Document;

    void validate() const;
};

struct LabeledSentence {
    int record_id = 0;
    std::vector<std::string> tokens;
    std::vector<WordLabel> labels;
    int cluster_id = 0;
};

// Per-word TEMPLATE/VARIABLE pseudo-labels from intra-cluster token
// frequency. DOCUMENT mode counts records containing a token at least once;
// POSITIONAL mode counts (position, token) pairs. Noise records produce no
// output — a singleton "cluster" would mark every token TEMPLATE.
std::vector<LabeledSentence> pseudo_label(const std::vector<LogRecord>& records,
                                          const ClusterAssignment& assignment,
                                          const LabelerConfig& config);

struct ClusterLabelCounts {
    int cluster_id = 0;
    std::int64_t template_tokens = 0;
    std::int64_t variable_tokens = 0;
};

struct LabelStatistics {
    std::vector<ClusterLabelCounts> per_cluster;
    std::size_t records_labeled = 0;
    std::size_t records_noise = 0;
    double noise_fraction = 0.0;
    std::int64_t template_tokens = 0;
    std::int64_t variable_tokens = 0;
};

LabelStatistics label_statistics(const std::vector<LabeledSentence>& labeled,
                                 std::size_t noise_records = 0);

// JSONL dump: {record_id, tokens, labels, cluster_id} per line.
void write_labeled_jsonl(const std::string& path, const std::vector<LabeledSentence>& labeled);

} // namespace logstamp
