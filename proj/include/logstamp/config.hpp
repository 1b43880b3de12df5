#pragma once

#include <string>

#include "logstamp/pipeline.hpp"

namespace logstamp {

// Flat key=value config file with [sections] mirroring the component
// configs:
//
//   [tokenizer]
//   extra_delimiters = =,:()[]
//   lowercase = false
//   [encoder]
//   embed_dim = 64
//   ...
//
// Unknown sections or keys are rejected up front. The file is optional;
// every key also has a CLI flag and flags win.
PipelineConfig load_pipeline_config(const std::string& path);

void apply_config_line(PipelineConfig& config, const std::string& section,
                       const std::string& key, const std::string& value);

std::string render_pipeline_config(const PipelineConfig& config);

} // namespace logstamp
