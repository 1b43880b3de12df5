#include "logstamp/labeler.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "logstamp/errors.hpp"

namespace logstamp {

void LabelerConfig::validate() const {
    if (!(tau > 0.0) || tau > 1.0)
        throw_error(ErrorKind::Parameter, "labeler: tau must be in (0,1]");
}

std::vector<LabeledSentence> pseudo_label(const std::vector<LogRecord>& records,
                                          const ClusterAssignment& assignment,
                                          const LabelerConfig& config) {
    config.validate();

    // cluster id -> record indices, in record order
    std::map<int, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const int id = records[i].id;
        if (id < 0 || id >= static_cast<int>(assignment.labels.size()))
            throw_error(ErrorKind::Consistency,
                        "pseudo_label: record id " + std::to_string(id) + " not in assignment");
        const int cluster = assignment.labels[static_cast<std::size_t>(id)];
        if (cluster == kNoise) continue;
        clusters[cluster].push_back(i);
    }

    std::vector<LabeledSentence> out;
    for (const auto& [cluster_id, members] : clusters) {
        const double cluster_size = static_cast<double>(members.size());

        std::unordered_map<std::string, std::int64_t> doc_freq;
        if (config.count_mode == CountMode::Document) {
            for (std::size_t i : members) {
                std::unordered_set<std::string> seen;
                for (const auto& tok : records[i].tokens)
                    if (seen.insert(tok).second) doc_freq[tok]++;
            }
        } else {
            for (std::size_t i : members) {
                const auto& tokens = records[i].tokens;
                for (std::size_t pos = 0; pos < tokens.size(); ++pos)
                    doc_freq[std::to_string(pos) + ':' + tokens[pos]]++;
            }
        }

        for (std::size_t i : members) {
            const auto& rec = records[i];
            LabeledSentence ls;
            ls.record_id = rec.id;
            ls.tokens = rec.tokens;
            ls.cluster_id = cluster_id;
            ls.labels.reserve(rec.tokens.size());
            for (std::size_t pos = 0; pos < rec.tokens.size(); ++pos) {
                const std::string key = config.count_mode == CountMode::Document
                                            ? rec.tokens[pos]
                                            : std::to_string(pos) + ':' + rec.tokens[pos];
                const double ratio = static_cast<double>(doc_freq[key]) / cluster_size;
                ls.labels.push_back(ratio >= config.tau ? WordLabel::Template
                                                        : WordLabel::Variable);
            }
            out.push_back(std::move(ls));
        }
    }

    std::sort(out.begin(), out.end(),
              [](const LabeledSentence& a, const LabeledSentence& b) {
                  return a.record_id < b.record_id;
              });
    return out;
}

LabelStatistics label_statistics(const std::vector<LabeledSentence>& labeled,
                                 std::size_t noise_records) {
    LabelStatistics stats;
    stats.records_labeled = labeled.size();
    stats.records_noise = noise_records;
    const std::size_t total = labeled.size() + noise_records;
    stats.noise_fraction =
        total == 0 ? 0.0 : static_cast<double>(noise_records) / static_cast<double>(total);

    std::map<int, ClusterLabelCounts> per_cluster;
    for (const auto& ls : labeled) {
        auto& c = per_cluster[ls.cluster_id];
        c.cluster_id = ls.cluster_id;
        for (WordLabel l : ls.labels) {
            if (l == WordLabel::Template) {
                c.template_tokens++;
                stats.template_tokens++;
            } else {
                c.variable_tokens++;
                stats.variable_tokens++;
            }
        }
    }
    stats.per_cluster.reserve(per_cluster.size());
    for (auto& [id, counts] : per_cluster) stats.per_cluster.push_back(counts);
    return stats;
}

void write_labeled_jsonl(const std::string& path, const std::vector<LabeledSentence>& labeled) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw_error(ErrorKind::Input, "cannot open for writing: " + path);
    for (const auto& ls : labeled) {
        nlohmann::json j;
        j["record_id"] = ls.record_id;
        j["tokens"] = ls.tokens;
        std::vector<std::string> labels;
        labels.reserve(ls.labels.size());
        for (WordLabel l : ls.labels) labels.emplace_back(word_label_name(l));
        j["labels"] = labels;
        j["cluster_id"] = ls.cluster_id;
        f << j.dump() << '\n';
    }
}

} // namespace logstamp
