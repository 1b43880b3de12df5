#include "logstamp/cluster.hpp"

#include <cmath>
#include <deque>
#include <fstream>

#include "logstamp/errors.hpp"

namespace logstamp {

namespace {

constexpr int kUnvisited = -2;

double cosine_distance(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return 1.0 - dot;
}

} // namespace

void DbscanConfig::validate() const {
    if (!(eps > 0.0) || eps > 2.0)
        throw_error(ErrorKind::Parameter, "dbscan: eps must be in (0,2]");
    if (min_pts < 1) throw_error(ErrorKind::Parameter, "dbscan: min_pts must be >= 1");
}

std::size_t ClusterAssignment::noise_count() const {
    std::size_t n = 0;
    for (int l : labels)
        if (l == kNoise) ++n;
    return n;
}

ClusterAssignment dbscan(const std::vector<std::vector<float>>& points,
                         const DbscanConfig& config) {
    config.validate();
    ClusterAssignment out;
    const std::size_t n = points.size();
    if (n == 0) return out;

    const std::size_t dim = points[0].size();
    for (const auto& p : points) {
        if (p.size() != dim)
            throw_error(ErrorKind::Input, "dbscan: points have mismatched dimensions");
        double norm2 = 0.0;
        for (float x : p) norm2 += static_cast<double>(x) * static_cast<double>(x);
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6)
            throw_error(ErrorKind::Input, "dbscan: points must be unit-norm");
    }

    // Exact neighbor lists (self included).
    std::vector<std::vector<int>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        neighbors[i].push_back(static_cast<int>(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            if (cosine_distance(points[i], points[j]) <= config.eps) {
                neighbors[i].push_back(static_cast<int>(j));
                neighbors[j].push_back(static_cast<int>(i));
            }
        }
    }

    std::vector<int> labels(n, kUnvisited);
    int next_cluster = 0;
    std::deque<int> frontier;

    for (std::size_t seed = 0; seed < n; ++seed) {
        if (labels[seed] != kUnvisited) continue;
        if (neighbors[seed].size() < static_cast<std::size_t>(config.min_pts)) {
            labels[seed] = kNoise;
            continue;
        }
        const int cluster = next_cluster++;
        labels[seed] = cluster;
        frontier.assign(neighbors[seed].begin(), neighbors[seed].end());
        while (!frontier.empty()) {
            int p = frontier.front();
            frontier.pop_front();
            if (labels[p] == kNoise) labels[p] = cluster; // noise becomes border
            if (labels[p] != kUnvisited) continue;
            labels[p] = cluster;
            if (neighbors[p].size() >= static_cast<std::size_t>(config.min_pts)) {
                frontier.insert(frontier.end(), neighbors[p].begin(), neighbors[p].end());
            }
        }
    }

    out.labels = std::move(labels);
    out.num_clusters = next_cluster;
    return out;
}

void write_cluster_debug_csv(const std::string& path,
                             const std::vector<std::vector<float>>& points,
                             const ClusterAssignment& assignment) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw_error(ErrorKind::Input, "cannot open for writing: " + path);
    f << "record_id,cluster_id,nearest_distance\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        double nearest = 2.0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            nearest = std::min(nearest, cosine_distance(points[i], points[j]));
        }
        f << i << ',' << assignment.labels[i] << ',' << nearest << '\n';
    }
}

} // namespace logstamp
