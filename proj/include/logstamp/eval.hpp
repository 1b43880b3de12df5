#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace logstamp {

// Total grouping of record ids: every evaluated id has exactly one group key.
struct Partition {
    std::unordered_map<int, std::string> groups;

    static Partition from_labels(const std::vector<std::string>& labels);
    static Partition from_labels(const std::vector<int>& labels);

    std::size_t size() const { return groups.size(); }
    std::size_t num_groups() const;
};

// Pair counts over all unordered record pairs:
//   tp  same truth group, same predicted group
//   tn  different truth group, different predicted group
//   fp  different truth group, same predicted group
//   fn  same truth group, different predicted group
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
};

// Exhaustive over all pairs (computed via contingency-table algebra, not
// sampling). Both partitions must cover the same id set with n >= 2.
ConfusionCounts pair_counts(const Partition& predicted, const Partition& truth);

// (tp+tn) / all pairs
double rand_index(const ConfusionCounts& counts);

} // namespace logstamp
