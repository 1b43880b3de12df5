#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>

#include "logstamp/datagen.hpp"
#include "logstamp/encoder.hpp"
#include "logstamp/errors.hpp"
#include "support/gradcheck.hpp"

using namespace logstamp;

namespace {

Dataset toy_two_template_corpus(int lines_per_template = 60) {
    // two templates with per-line variable tokens
    std::vector<std::string> lines;
    std::vector<std::string> truths;
    for (int i = 0; i < lines_per_template; ++i) {
        lines.push_back("Interface eth" + std::to_string(i) + " change state to down");
        truths.emplace_back("A");
        lines.push_back("Received block blk_" + std::to_string(1000 + i) + " of size " +
                        std::to_string(17 + i));
        truths.emplace_back("B");
    }
    return dataset_from_lines(lines, TokenizerConfig{}, "toy", truths);
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return dot;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("build_vocab filters by count and truncates") {
    Dataset ds = dataset_from_lines({"a a a b"}, TokenizerConfig{});
    EncoderConfig cfg;
    cfg.min_token_count = 2;
    Vocabulary vocab = build_vocab(ds, cfg);
    CHECK(vocab.real_tokens() == std::vector<std::string>{"a"});
    CHECK(vocab.size() == 3); // a + UNKNOWN + MASK
    CHECK(vocab.id_of("a") == 0);
    CHECK(vocab.id_of("b") == vocab.unknown_id());
    CHECK(vocab.unknown_id() != vocab.mask_id());

    EncoderConfig cap;
    cap.max_vocab = 1;
    Dataset ds2 = dataset_from_lines({"x x y"}, TokenizerConfig{});
    Vocabulary vocab2 = build_vocab(ds2, cap);
    CHECK(vocab2.real_tokens() == std::vector<std::string>{"x"});
}

TEST_CASE("build_vocab size on a 2k corpus equals an independent distinct-token count") {
    TokenizerConfig tok;
    Dataset ds = generate_synthetic_dataset("HDFS", 2000, 7, tok);
    EncoderConfig cfg;
    Vocabulary vocab = build_vocab(ds, cfg);

    std::set<std::string> distinct;
    for (const auto& rec : ds.records)
        for (const auto& t : rec.tokens) distinct.insert(t);

    const std::size_t expected = std::min<std::size_t>(distinct.size(), 20000);
    CHECK(vocab.real_tokens().size() == expected);
    CHECK(static_cast<std::size_t>(vocab.size()) == expected + 2);
}

TEST_CASE("mask sampler hits the expected rate") {
    Rng rng(3);
    const int passes = 1000;
    const int len = 20;
    std::int64_t total = 0;
    for (int i = 0; i < passes; ++i)
        total += static_cast<std::int64_t>(sample_mask_positions(rng, len, 0.15).size());
    const double mean = static_cast<double>(total) / passes;
    CHECK(mean > 2.5);
    CHECK(mean < 3.5);
}

TEST_CASE("train_encoder memorizes a constant corpus and beats the frequency baseline") {
    std::vector<std::string> lines(100, "a b c");
    Dataset ds = dataset_from_lines(lines, TokenizerConfig{});

    EncoderConfig cfg;
    cfg.embed_dim = 16;
    cfg.hidden_dim = 16;
    cfg.epochs = 5;
    cfg.learning_rate = 0.25;
    cfg.seed = 1;
    EncoderModel model = train_encoder(ds, cfg);

    const double accuracy = masked_prediction_accuracy(model, ds);

    // baseline oracle: always predict the globally most frequent token;
    // all three tokens appear 100 times, so it can match at most one of them
    std::unordered_map<std::string, int> freq;
    for (const auto& rec : ds.records)
        for (const auto& t : rec.tokens) freq[t]++;
    std::string best_token;
    int best_count = -1;
    for (const auto& [tok, count] : freq)
        if (count > best_count || (count == best_count && tok < best_token)) {
            best_token = tok;
            best_count = count;
        }
    std::int64_t baseline_hits = 0, total = 0;
    for (const auto& rec : ds.records)
        for (const auto& t : rec.tokens) {
            if (t == best_token) ++baseline_hits;
            ++total;
        }
    const double baseline = static_cast<double>(baseline_hits) / static_cast<double>(total);

    CHECK(baseline == doctest::Approx(1.0 / 3.0));
    CHECK(accuracy > 0.9);
    CHECK(accuracy > baseline);
}

TEST_CASE("train_encoder is deterministic and reduces the loss") {
    Dataset ds = toy_two_template_corpus(40);
    EncoderConfig cfg;
    cfg.embed_dim = 12;
    cfg.hidden_dim = 12;
    cfg.epochs = 4;
    cfg.seed = 9;

    EncoderModel a = train_encoder(ds, cfg);
    EncoderModel b = train_encoder(ds, cfg);
    CHECK(a.params == b.params);
    CHECK(a.meta.epoch_losses == b.meta.epoch_losses);

    REQUIRE(a.meta.epoch_losses.size() == 4);
    CHECK(a.meta.final_loss < a.meta.epoch_losses.front());

    CHECK_THROWS_AS(train_encoder(Dataset{}, cfg), Error);
}

TEST_CASE("embedding parameters stay finite after training") {
    Dataset ds = toy_two_template_corpus(30);
    EncoderConfig cfg;
    cfg.embed_dim = 8;
    cfg.hidden_dim = 8;
    cfg.epochs = 3;
    EncoderModel model = train_encoder(ds, cfg);
    for (float p : model.params) CHECK(std::isfinite(p));
}

TEST_CASE("embed_tokens is contextual and deterministic") {
    Dataset ds = toy_two_template_corpus(40);
    EncoderConfig cfg;
    cfg.embed_dim = 12;
    cfg.hidden_dim = 12;
    cfg.epochs = 4;
    EncoderModel model = train_encoder(ds, cfg);

    const std::vector<std::string> s1 = {"Interface", "eth0", "change", "state", "to", "down"};
    const std::vector<std::string> s2 = {"size", "change", "down"};
    auto e1 = embed_tokens(model, s1);
    auto e2 = embed_tokens(model, s2);
    // "down" in two different sentences embeds differently
    CHECK(e1[5] != e2[2]);

    // identical sentences give identical embeddings
    CHECK(embed_tokens(model, s1) == e1);

    // out-of-vocabulary tokens are finite via the UNKNOWN id
    auto oov = embed_tokens(model, {"zzz-never-seen", "down"});
    for (const auto& vec : oov)
        for (float x : vec) CHECK(std::isfinite(x));

    // output dimension is embed_dim for every input length
    for (std::size_t len : {1u, 2u, 7u, 19u}) {
        std::vector<std::string> tokens(len, "change");
        auto vecs = embed_tokens(model, tokens);
        REQUIRE(vecs.size() == len);
        for (const auto& v : vecs) CHECK(v.size() == 12);
    }

    CHECK_THROWS_AS(embed_tokens(model, {}), Error);
}

TEST_CASE("embed_sentence pools and normalizes") {
    Dataset ds = toy_two_template_corpus(40);
    EncoderConfig cfg;
    cfg.embed_dim = 12;
    cfg.hidden_dim = 12;
    cfg.epochs = 4;
    EncoderModel model = train_encoder(ds, cfg);

    // single token: sentence embedding equals the normalized token vector
    auto single_tokens = embed_tokens(model, {"down"});
    auto single_sentence = embed_sentence(model, {"down"});
    double norm = std::sqrt(cosine(single_tokens[0], single_tokens[0]));
    for (std::size_t j = 0; j < single_tokens[0].size(); ++j)
        CHECK(single_sentence.vector[j] ==
              doctest::Approx(single_tokens[0][j] / norm).epsilon(1e-5));

    // mean-pool linearity before normalization
    const std::vector<std::string> tokens = {"change", "state", "to"};
    auto vecs = embed_tokens(model, tokens);
    std::vector<double> mean(12, 0.0);
    for (const auto& v : vecs)
        for (std::size_t j = 0; j < v.size(); ++j) mean[j] += v[j] / 3.0;
    double mnorm = 0.0;
    for (double x : mean) mnorm += x * x;
    mnorm = std::sqrt(mnorm);
    auto sentence = embed_sentence(model, tokens);
    for (std::size_t j = 0; j < mean.size(); ++j)
        CHECK(sentence.vector[j] == doctest::Approx(mean[j] / mnorm).epsilon(1e-5));

    // unit norm within 1e-6
    double n2 = 0.0;
    for (float x : sentence.vector) n2 += static_cast<double>(x) * x;
    CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-6);

    CHECK_THROWS_AS(embed_sentence(model, {}), Error);
}

TEST_CASE("same-template lines embed closer than cross-template lines") {
    Dataset ds = toy_two_template_corpus(60);
    EncoderConfig cfg;
    cfg.embed_dim = 16;
    cfg.hidden_dim = 16;
    cfg.epochs = 5;
    EncoderModel model = train_encoder(ds, cfg);

    auto a1 = embed_sentence(model, tokenize("Interface eth7 change state to down", {})).vector;
    auto a2 = embed_sentence(model, tokenize("Interface eth9 change state to down", {})).vector;
    auto b1 = embed_sentence(model, tokenize("Received block blk_1004 of size 21", {})).vector;

    CHECK(cosine(a1, a2) > cosine(a1, b1));
    CHECK(cosine(a1, a2) > cosine(a2, b1));
}

TEST_CASE("encoder gradients match central finite differences") {
    Dataset ds = dataset_from_lines({"a b c", "a d c"}, TokenizerConfig{});
    EncoderConfig cfg;
    cfg.embed_dim = 4;
    cfg.hidden_dim = 4;
    cfg.seed = 19;
    EncoderModel model = train_encoder(ds, cfg); // a trained point, not just init

    const std::vector<std::vector<int>> lines = {
        token_ids(model.vocab, {"a", "b", "c"}),
        token_ids(model.vocab, {"a", "d", "c"}),
    };
    const std::vector<std::vector<int>> masks = {{0, 2}, {1}};

    std::vector<double> analytic(model.params.size(), 0.0);
    for (std::size_t i = 0; i < lines.size(); ++i)
        masked_prediction_loss_grad(model, lines[i], masks[i], analytic);

    auto loss_at = [&](const std::vector<float>& params) {
        EncoderModel probe = model;
        probe.params = params;
        double loss = 0.0;
        for (std::size_t i = 0; i < lines.size(); ++i)
            loss += masked_prediction_loss(probe, lines[i], masks[i]);
        return loss;
    };

    auto result = oracles::finite_difference_check(model.params, analytic, loss_at);
    INFO("max relative error ", result.max_rel_error, " at param ", result.worst_index);
    CHECK(result.ok);
}

TEST_CASE("encoder save/load round trip and failure modes") {
    Dataset ds = toy_two_template_corpus(20);
    EncoderConfig cfg;
    cfg.embed_dim = 8;
    cfg.hidden_dim = 8;
    cfg.epochs = 2;
    EncoderModel model = train_encoder(ds, cfg);

    const std::string path = temp_path("logstamp_encoder_model.bin");
    save_encoder(model, path);
    EncoderModel loaded = load_encoder(path);

    CHECK(loaded.params == model.params);
    const std::vector<std::string> probe = {"Interface", "eth3", "change"};
    CHECK(embed_tokens(loaded, probe) == embed_tokens(model, probe));
    CHECK(loaded.meta.epoch_losses == model.meta.epoch_losses);

    // wrong magic
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << "NOTAMODEL-------------------";
    }
    try {
        load_encoder(path);
        FAIL("expected format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Format);
    }

    // flipped checksum byte
    save_encoder(model, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekg(0, std::ios::end);
        const auto size = static_cast<long>(f.tellg());
        f.seekp(size - 1);
        f.seekg(size - 1);
        char c;
        f.get(c);
        f.seekp(size - 1);
        f.put(static_cast<char>(c ^ 0x01));
    }
    try {
        load_encoder(path);
        FAIL("expected corruption error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Corruption);
    }
    std::remove(path.c_str());
}

TEST_CASE("max_line_visits caps encoder training deterministically") {
    Dataset ds = toy_two_template_corpus(30); // 60 lines
    EncoderConfig cfg;
    cfg.embed_dim = 8;
    cfg.hidden_dim = 8;
    cfg.epochs = 50;
    cfg.max_line_visits = 90; // one full pass plus half of the next
    cfg.seed = 4;
    EncoderModel a = train_encoder(ds, cfg);
    EncoderModel b = train_encoder(ds, cfg);
    CHECK(a.params == b.params);
    CHECK(a.meta.epoch_losses.size() == 2); // the second pass is partial

    // a larger budget changes the outcome; the epoch cap still applies
    cfg.max_line_visits = 120;
    EncoderModel c = train_encoder(ds, cfg);
    CHECK(c.params != a.params);
    CHECK(c.meta.epoch_losses.size() == 2);

    cfg.max_line_visits = 0; // cap off: all 50 epochs run
    cfg.epochs = 3;
    EncoderModel d = train_encoder(ds, cfg);
    CHECK(d.meta.epoch_losses.size() == 3);

    cfg.max_line_visits = -1;
    CHECK_THROWS_AS(train_encoder(ds, cfg), Error);
}
