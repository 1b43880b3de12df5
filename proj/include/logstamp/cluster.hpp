#pragma once

#include <string>
#include <vector>

namespace logstamp {

struct DbscanConfig {
    double eps = 0.05; // cosine-distance radius
    int min_pts = 2;   // neighbors required for a core point, counting itself

    void validate() const;
};

constexpr int kNoise = -1;

// labels[i] is the cluster of point i (contiguous ids starting at 0) or
// kNoise.
struct ClusterAssignment {
    std::vector<int> labels;
    int num_clusters = 0;

    std::size_t noise_count() const;
};

// Density clustering over unit-norm vectors with distance 1 - dot(u, v).
// Points are processed in ascending index order and clusters grown to
// completion before the next seed is considered, so a border point in reach
// of several clusters deterministically joins the first one grown.
// Neighborhoods are exact brute-force O(n^2).
ClusterAssignment dbscan(const std::vector<std::vector<float>>& points,
                         const DbscanConfig& config);

// Debug dump: record id, cluster id, distance to nearest other point.
void write_cluster_debug_csv(const std::string& path,
                             const std::vector<std::vector<float>>& points,
                             const ClusterAssignment& assignment);

} // namespace logstamp
