#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "logstamp/cluster.hpp"
#include "logstamp/errors.hpp"
#include "logstamp/rng.hpp"
#include "support/oracles.hpp"

using namespace logstamp;

namespace {

std::vector<float> unit2(double angle) {
    return {static_cast<float>(std::cos(angle)), static_cast<float>(std::sin(angle))};
}

// random unit vector in `dim` dimensions
std::vector<float> random_unit(Rng& rng, int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm2 = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<float> out(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] * inv);
    return out;
}

// unit vector near `center`, within cosine distance roughly `spread`
std::vector<float> jitter(Rng& rng, const std::vector<float>& center, double spread) {
    std::vector<double> v(center.size());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
        v[i] = static_cast<double>(center[i]) + spread * rng.normal();
        norm2 += v[i] * v[i];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<float> out(center.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] * inv);
    return out;
}

// canonical form: relabel clusters by first appearance, keep noise at -1
std::vector<int> canonicalize_labels(const std::vector<int>& labels) {
    std::map<int, int> remap;
    std::vector<int> out;
    out.reserve(labels.size());
    int next = 0;
    for (int l : labels) {
        if (l == kNoise) {
            out.push_back(kNoise);
            continue;
        }
        auto [it, inserted] = remap.emplace(l, next);
        if (inserted) ++next;
        out.push_back(it->second);
    }
    return out;
}

} // namespace

TEST_CASE("dbscan groups identical vectors into one cluster") {
    std::vector<std::vector<float>> points(5, std::vector<float>{1.0f, 0.0f});
    auto assignment = dbscan(points, DbscanConfig{});
    CHECK(assignment.num_clusters == 1);
    for (int l : assignment.labels) CHECK(l == 0);
    CHECK(assignment.noise_count() == 0);
}

TEST_CASE("dbscan separates orthogonal groups") {
    std::vector<std::vector<float>> points;
    for (int i = 0; i < 5; ++i) points.push_back({1.0f, 0.0f});
    for (int i = 0; i < 5; ++i) points.push_back({0.0f, 1.0f});
    auto assignment = dbscan(points, DbscanConfig{});
    CHECK(assignment.num_clusters == 2);
    for (int i = 0; i < 5; ++i) CHECK(assignment.labels[static_cast<std::size_t>(i)] == 0);
    for (int i = 5; i < 10; ++i) CHECK(assignment.labels[static_cast<std::size_t>(i)] == 1);
}

TEST_CASE("dbscan marks far outliers as noise, agreeing with the reference") {
    Rng rng(11);
    std::vector<std::vector<float>> points;
    const auto c1 = unit2(0.0);
    const auto c2 = unit2(1.8);
    for (int i = 0; i < 15; ++i) points.push_back(jitter(rng, c1, 0.01));
    for (int i = 0; i < 15; ++i) points.push_back(jitter(rng, c2, 0.01));
    points.push_back(unit2(0.9));
    points.push_back(unit2(-1.2));
    points.push_back(unit2(2.9));

    DbscanConfig cfg;
    cfg.eps = 0.02;
    cfg.min_pts = 3;
    auto assignment = dbscan(points, cfg);
    auto reference = oracles::reference_dbscan(points, cfg.eps, cfg.min_pts);

    CHECK(assignment.num_clusters == 2);
    CHECK(assignment.noise_count() == 3);
    CHECK(canonicalize_labels(assignment.labels) == canonicalize_labels(reference.labels));
    for (std::size_t i = 30; i < 33; ++i) CHECK(assignment.labels[i] == kNoise);
}

TEST_CASE("dbscan equals independently written reference on randomized instances") {
    Rng rng(4242);
    for (int trial = 0; trial < 60; ++trial) {
        const int dim = 2 + static_cast<int>(rng.below(6));
        const int blobs = 1 + static_cast<int>(rng.below(4));
        const int n_extra = static_cast<int>(rng.below(8));
        std::vector<std::vector<float>> points;
        for (int b = 0; b < blobs; ++b) {
            const auto center = random_unit(rng, dim);
            const int members = 2 + static_cast<int>(rng.below(20));
            for (int i = 0; i < members; ++i)
                points.push_back(jitter(rng, center, rng.uniform(0.0, 0.08)));
        }
        for (int i = 0; i < n_extra; ++i) points.push_back(random_unit(rng, dim));
        // shuffle point order so cluster memory layout is not grouped
        rng.shuffle(points);

        DbscanConfig cfg;
        cfg.eps = rng.uniform(0.01, 0.4);
        cfg.min_pts = 1 + static_cast<int>(rng.below(5));

        auto assignment = dbscan(points, cfg);
        auto reference = oracles::reference_dbscan(points, cfg.eps, cfg.min_pts);
        REQUIRE(assignment.labels.size() == reference.labels.size());
        CHECK(canonicalize_labels(assignment.labels) == canonicalize_labels(reference.labels));
        CHECK(assignment.num_clusters == reference.num_clusters);
    }
}

TEST_CASE("dbscan cluster members stay within eps of a core point") {
    Rng rng(99);
    std::vector<std::vector<float>> points;
    const auto c1 = unit2(0.3);
    for (int i = 0; i < 25; ++i) points.push_back(jitter(rng, c1, 0.05));
    DbscanConfig cfg;
    cfg.eps = 0.05;
    cfg.min_pts = 4;
    auto assignment = dbscan(points, cfg);

    // recompute core points directly
    std::vector<bool> core(points.size(), false);
    for (std::size_t i = 0; i < points.size(); ++i) {
        int count = 0;
        for (std::size_t j = 0; j < points.size(); ++j)
            if (oracles::ref_cosine_distance(points[i], points[j]) <= cfg.eps) ++count;
        core[i] = count >= cfg.min_pts;
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (assignment.labels[i] == kNoise) continue;
        bool reached = false;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (!core[j] || assignment.labels[j] != assignment.labels[i]) continue;
            if (oracles::ref_cosine_distance(points[i], points[j]) <= cfg.eps) {
                reached = true;
                break;
            }
        }
        CHECK(reached);
    }
}

TEST_CASE("dbscan permutation changes labels only up to relabeling") {
    Rng rng(5);
    std::vector<std::vector<float>> points;
    for (int b = 0; b < 3; ++b) {
        const auto center = random_unit(rng, 4);
        for (int i = 0; i < 8; ++i) points.push_back(jitter(rng, center, 0.02));
    }
    DbscanConfig cfg;
    cfg.eps = 0.05;
    cfg.min_pts = 2;
    auto base = dbscan(points, cfg);

    std::vector<std::size_t> perm(points.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<std::vector<float>> permuted(points.size());
    for (std::size_t i = 0; i < perm.size(); ++i) permuted[i] = points[perm[i]];
    auto shuffled = dbscan(permuted, cfg);

    // compare induced partitions as sets of sets via pairwise co-membership
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            const bool together_base =
                base.labels[perm[a]] != kNoise && base.labels[perm[a]] == base.labels[perm[b]];
            const bool together_shuffled =
                shuffled.labels[a] != kNoise && shuffled.labels[a] == shuffled.labels[b];
            CHECK(together_base == together_shuffled);
        }
    }
}

TEST_CASE("dbscan input validation") {
    CHECK(dbscan({}, DbscanConfig{}).labels.empty());

    std::vector<std::vector<float>> mismatched = {{1.0f, 0.0f}, {1.0f, 0.0f, 0.0f}};
    CHECK_THROWS_AS(dbscan(mismatched, DbscanConfig{}), Error);

    std::vector<std::vector<float>> not_unit = {{0.5f, 0.0f}};
    CHECK_THROWS_AS(dbscan(not_unit, DbscanConfig{}), Error);

    DbscanConfig bad;
    bad.eps = 0.0;
    CHECK_THROWS_AS(dbscan({{1.0f}}, bad), Error);
    bad.eps = 0.1;
    bad.min_pts = 0;
    CHECK_THROWS_AS(dbscan({{1.0f}}, bad), Error);
}

TEST_CASE("cluster debug dump lists id, cluster, nearest distance") {
    std::vector<std::vector<float>> points = {{1.0f, 0.0f}, {1.0f, 0.0f}, {0.0f, 1.0f}};
    DbscanConfig cfg;
    auto assignment = dbscan(points, cfg);
    const std::string path =
        (std::filesystem::temp_directory_path() / "logstamp_cluster_debug.csv").string();
    write_cluster_debug_csv(path, points, assignment);
    std::ifstream f(path);
    std::string header, row0, row2;
    std::getline(f, header);
    CHECK(header == "record_id,cluster_id,nearest_distance");
    std::getline(f, row0);
    CHECK(row0.rfind("0,0,0", 0) == 0); // identical twin at distance 0
    std::getline(f, row2);
    std::getline(f, row2);
    CHECK(row2.rfind("2,", 0) == 0); // orthogonal point, distance 1
    CHECK(row2.find(",1") != std::string::npos);
    std::remove(path.c_str());
}
