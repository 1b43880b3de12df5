#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logstamp/corpus.hpp"

namespace logstamp {

// Deterministic Loghub-style benchmark corpora: five system flavors with
// realistic template inventories, skewed template frequencies, and reusable
// variable pools. Used by the evaluation harness when the real structured
// CSVs are not on disk.
std::vector<std::string> synthetic_dataset_names();

bool is_synthetic_dataset_name(const std::string& name);

Dataset generate_synthetic_dataset(const std::string& name, int lines, std::uint64_t seed,
                                   const TokenizerConfig& tokenizer);

// LineId,Content,EventId structured CSV, loadable by load_loghub_csv.
void write_synthetic_csv(const std::string& path, const std::string& name, int lines,
                         std::uint64_t seed);

} // namespace logstamp
