#pragma once

// Test-side reference implementations, kept independent of the library code
// paths they check.

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "logstamp/cluster.hpp"
#include "logstamp/eval.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Reference DBSCAN: core points via direct neighbor counting, clusters as
// union-find components over core-core eps-edges, border points assigned by
// the declarative tie rule (cluster containing the smallest core id among
// those in reach). Noise = everything else.
// ---------------------------------------------------------------------------

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

inline double ref_cosine_distance(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return 1.0 - dot;
}

inline logstamp::ClusterAssignment reference_dbscan(const std::vector<std::vector<float>>& points,
                                                    double eps, int min_pts) {
    const std::size_t n = points.size();
    logstamp::ClusterAssignment out;
    if (n == 0) return out;

    std::vector<std::vector<int>> neigh(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (ref_cosine_distance(points[i], points[j]) <= eps)
                neigh[i].push_back(static_cast<int>(j));

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i)
        core[i] = neigh[i].size() >= static_cast<std::size_t>(min_pts);

    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        for (int j : neigh[i])
            if (core[static_cast<std::size_t>(j)]) uf.unite(i, static_cast<std::size_t>(j));
    }

    // components numbered by their minimal core id, ascending
    std::map<std::size_t, int> component_order; // root -> min core id
    std::vector<int> min_core(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        std::size_t r = uf.find(i);
        if (min_core[r] < 0) min_core[r] = static_cast<int>(i); // ids scanned ascending
    }
    std::map<int, int> cluster_of_min; // min core id -> cluster id
    for (std::size_t i = 0; i < n; ++i)
        if (core[i]) cluster_of_min[min_core[uf.find(i)]] = 0;
    int next = 0;
    for (auto& [min_id, cid] : cluster_of_min) cid = next++;

    out.labels.assign(n, logstamp::kNoise);
    out.num_clusters = next;
    for (std::size_t i = 0; i < n; ++i)
        if (core[i]) out.labels[i] = cluster_of_min[min_core[uf.find(i)]];

    // border points: smallest cluster id among reaching core points, which by
    // the numbering above is the cluster grown earliest in scan order
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        int best = -1;
        for (int j : neigh[i]) {
            if (!core[static_cast<std::size_t>(j)]) continue;
            int cid = out.labels[static_cast<std::size_t>(j)];
            if (best < 0 || cid < best) best = cid;
        }
        if (best >= 0) out.labels[i] = best;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force pair counting: explicit double loop over unordered pairs with
// the paper's four pair categories.
// ---------------------------------------------------------------------------

struct BruteCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
};

inline BruteCounts brute_force_pair_counts(const std::vector<std::string>& predicted,
                                           const std::vector<std::string>& truth) {
    BruteCounts counts;
    const std::size_t n = predicted.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_truth = truth[i] == truth[j];
            const bool same_pred = predicted[i] == predicted[j];
            if (same_truth && same_pred) counts.tp++;
            else if (!same_truth && !same_pred) counts.tn++;
            else if (!same_truth && same_pred) counts.fp++;
            else counts.fn++;
        }
    }
    return counts;
}

// All set partitions of {0..n-1} as restricted growth strings; element i gets
// group label rgs[i].
inline std::vector<std::vector<std::string>> all_partitions(int n) {
    std::vector<std::vector<std::string>> out;
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(n));
        for (int v : rgs) labels.push_back(std::to_string(v));
        out.push_back(std::move(labels));

        // next restricted growth string
        int i = n - 1;
        while (i > 0) {
            int max_prefix = 0;
            for (int k = 0; k < i; ++k) max_prefix = std::max(max_prefix, rgs[static_cast<std::size_t>(k)]);
            if (rgs[static_cast<std::size_t>(i)] <= max_prefix) break;
            --i;
        }
        if (i == 0) break;
        rgs[static_cast<std::size_t>(i)]++;
        for (int k = i + 1; k < n; ++k) rgs[static_cast<std::size_t>(k)] = 0;
    }
    return out;
}

} // namespace oracles
