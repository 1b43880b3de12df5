#include <doctest.h>

#include "logstamp/errors.hpp"
#include "logstamp/eval.hpp"
#include "logstamp/rng.hpp"
#include "support/oracles.hpp"

using namespace logstamp;

TEST_CASE("pair_counts on identical partitions of {a,a,b,b}") {
    Partition p = Partition::from_labels(std::vector<std::string>{"a", "a", "b", "b"});
    ConfusionCounts c = pair_counts(p, p);
    CHECK(c.tp == 2);
    CHECK(c.tn == 4);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(rand_index(c) == 1.0);
}

TEST_CASE("pair_counts all-singletons vs one truth group") {
    Partition predicted = Partition::from_labels(std::vector<std::string>{"0", "1", "2"});
    Partition truth = Partition::from_labels(std::vector<std::string>{"g", "g", "g"});
    ConfusionCounts c = pair_counts(predicted, truth);
    CHECK(c.tp == 0);
    CHECK(c.fn == 3);
    CHECK(c.tn == 0);
    CHECK(c.fp == 0);
    CHECK(rand_index(c) == 0.0);
}

TEST_CASE("pair_counts totals are n choose 2 and match the brute-force oracle on random partitions") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(12));
        std::vector<std::string> predicted, truth;
        for (int i = 0; i < n; ++i) {
            predicted.push_back(std::to_string(rng.below(4)));
            truth.push_back(std::to_string(rng.below(4)));
        }
        ConfusionCounts c =
            pair_counts(Partition::from_labels(predicted), Partition::from_labels(truth));
        auto brute = oracles::brute_force_pair_counts(predicted, truth);
        CHECK(c.tp == brute.tp);
        CHECK(c.tn == brute.tn);
        CHECK(c.fp == brute.fp);
        CHECK(c.fn == brute.fn);
        CHECK(c.total() == static_cast<std::uint64_t>(n) * (n - 1) / 2);
    }
}

TEST_CASE("rand_index identity and symmetry properties") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(10));
        std::vector<std::string> a, b;
        for (int i = 0; i < n; ++i) {
            a.push_back(std::to_string(rng.below(3)));
            b.push_back(std::to_string(rng.below(3)));
        }
        Partition pa = Partition::from_labels(a);
        Partition pb = Partition::from_labels(b);
        CHECK(rand_index(pair_counts(pa, pa)) == 1.0);
        CHECK(rand_index(pair_counts(pa, pb)) == doctest::Approx(rand_index(pair_counts(pb, pa))));
        // fp/fn swap roles under argument exchange, tp/tn stay put
        ConfusionCounts ab = pair_counts(pa, pb);
        ConfusionCounts ba = pair_counts(pb, pa);
        CHECK(ab.tp == ba.tp);
        CHECK(ab.tn == ba.tn);
        CHECK(ab.fp == ba.fn);
        CHECK(ab.fn == ba.fp);
    }
}

TEST_CASE("pair_counts exhaustive oracle equivalence on all partition pairs up to 6 elements") {
    for (int n = 2; n <= 6; ++n) {
        const auto partitions = oracles::all_partitions(n);
        if (n == 6) CHECK(partitions.size() == 203); // Bell(6)
        for (const auto& predicted : partitions) {
            for (const auto& truth : partitions) {
                ConfusionCounts c = pair_counts(Partition::from_labels(predicted),
                                                Partition::from_labels(truth));
                auto brute = oracles::brute_force_pair_counts(predicted, truth);
                REQUIRE(c.tp == brute.tp);
                REQUIRE(c.tn == brute.tn);
                REQUIRE(c.fp == brute.fp);
                REQUIRE(c.fn == brute.fn);
            }
        }
    }
}

TEST_CASE("pair_counts error paths") {
    Partition two = Partition::from_labels(std::vector<std::string>{"a", "b"});
    Partition three = Partition::from_labels(std::vector<std::string>{"a", "b", "c"});
    try {
        pair_counts(two, three);
        FAIL("expected input error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Input);
    }
    Partition one = Partition::from_labels(std::vector<std::string>{"a"});
    try {
        pair_counts(one, one);
        FAIL("expected parameter error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parameter);
    }
    // mismatched id sets of equal size
    Partition ids_a, ids_b;
    ids_a.groups = {{0, "x"}, {1, "x"}};
    ids_b.groups = {{0, "x"}, {2, "x"}};
    CHECK_THROWS_AS(pair_counts(ids_a, ids_b), Error);
}

TEST_CASE("rand_index rejects zero totals") {
    ConfusionCounts zero;
    CHECK_THROWS_AS(rand_index(zero), Error);
    ConfusionCounts some;
    some.fn = 3;
    CHECK(rand_index(some) == 0.0);
}
