#include "logstamp/eval.hpp"

#include "logstamp/errors.hpp"

namespace logstamp {

Partition Partition::from_labels(const std::vector<std::string>& labels) {
    Partition p;
    p.groups.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        p.groups.emplace(static_cast<int>(i), labels[i]);
    return p;
}

Partition Partition::from_labels(const std::vector<int>& labels) {
    Partition p;
    p.groups.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        p.groups.emplace(static_cast<int>(i), std::to_string(labels[i]));
    return p;
}

std::size_t Partition::num_groups() const {
    std::unordered_map<std::string, int> seen;
    for (const auto& [id, g] : groups) seen.emplace(g, 0);
    return seen.size();
}

namespace {

inline std::uint64_t pairs_of(std::uint64_t n) { return n * (n - 1) / 2; }

} // namespace

ConfusionCounts pair_counts(const Partition& predicted, const Partition& truth) {
    if (predicted.groups.size() != truth.groups.size())
        throw_error(ErrorKind::Input, "pair_counts: partitions cover different id sets");
    const std::uint64_t n = predicted.groups.size();
    if (n < 2) throw_error(ErrorKind::Parameter, "pair_counts: need at least 2 records");

    // contingency cells (truth group, predicted group) -> count
    std::unordered_map<std::string, std::uint64_t> truth_sizes;
    std::unordered_map<std::string, std::uint64_t> pred_sizes;
    std::unordered_map<std::string, std::uint64_t> cell_sizes;
    truth_sizes.reserve(truth.groups.size());
    pred_sizes.reserve(truth.groups.size());
    cell_sizes.reserve(truth.groups.size());

    for (const auto& [id, tg] : truth.groups) {
        auto it = predicted.groups.find(id);
        if (it == predicted.groups.end())
            throw_error(ErrorKind::Input,
                        "pair_counts: id " + std::to_string(id) + " missing from prediction");
        const std::string& pg = it->second;
        truth_sizes[tg]++;
        pred_sizes[pg]++;
        cell_sizes[std::to_string(tg.size()) + ':' + tg + pg]++;
    }

    std::uint64_t same_both = 0, same_truth = 0, same_pred = 0;
    for (const auto& [k, c] : cell_sizes) same_both += pairs_of(c);
    for (const auto& [k, c] : truth_sizes) same_truth += pairs_of(c);
    for (const auto& [k, c] : pred_sizes) same_pred += pairs_of(c);

    ConfusionCounts counts;
    counts.tp = same_both;
    counts.fn = same_truth - same_both; // same truth, split by prediction
    counts.fp = same_pred - same_both;  // different truth, merged by prediction
    counts.tn = pairs_of(n) - counts.tp - counts.fn - counts.fp;
    return counts;
}

double rand_index(const ConfusionCounts& counts) {
    const std::uint64_t total = counts.total();
    if (total == 0) throw_error(ErrorKind::Parameter, "rand_index: zero pair count");
    return static_cast<double>(counts.tp + counts.tn) / static_cast<double>(total);
}

} // namespace logstamp
