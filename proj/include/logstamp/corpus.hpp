#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace logstamp {

// One tokenized log line. `id` is the 0-based position in dataset order;
// `truth_group` is the ground-truth template identifier when the dataset
// carries labels.
struct LogRecord {
    int id = 0;
    std::string content;
    std::vector<std::string> tokens;
    std::optional<std::string> truth_group;
};

struct TokenizerConfig {
    // Characters that split tokens in addition to whitespace (whitespace is
    // always a delimiter). Defaults split key=value and bracketed fields.
    std::set<char> extra_delimiters = {'=', ',', ':', '(', ')', '[', ']'};
    bool lowercase = false;
};

struct Dataset {
    std::string name;
    std::vector<LogRecord> records;
    bool labeled = false;

    // load bookkeeping: rows dropped for empty content / undecodable bytes
    std::size_t skipped_empty = 0;
    std::size_t skipped_undecodable = 0;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

struct CsvColumns {
    std::string content = "Content";
    std::string truth = "EventId";
};

// Maximal runs of non-delimiter characters, in order. Empty input gives an
// empty list.
std::vector<std::string> tokenize(const std::string& content, const TokenizerConfig& config);

std::string join_tokens(const std::vector<std::string>& tokens);

// Loghub-style structured CSV: header row, a content column, optionally a
// ground-truth event-id column. Rows with empty content or invalid UTF-8 are
// skipped and counted on the returned Dataset.
Dataset load_loghub_csv(const std::string& path, const TokenizerConfig& config,
                        const CsvColumns& columns = {},
                        const std::string& dataset_name = "");

// Build a Dataset from raw lines (handy for tests and the python bindings).
Dataset dataset_from_lines(const std::vector<std::string>& lines,
                           const TokenizerConfig& config,
                           const std::string& name = "inline",
                           const std::vector<std::string>& truth_groups = {});

struct TrainTestSplit {
    Dataset train;              // re-indexed 0..k-1
    Dataset test;               // the full dataset, unchanged
    std::vector<int> train_source_ids; // ascending original ids of the train rows
};

// Sample round(fraction*n) records uniformly without replacement under
// `seed`. The test side is the whole dataset: training on a slice and then
// parsing everything is the evaluation protocol this toolkit targets.
TrainTestSplit split_train(const Dataset& dataset, double fraction, std::uint64_t seed);

} // namespace logstamp
