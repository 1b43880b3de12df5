#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "logstamp/corpus.hpp"
#include "logstamp/errors.hpp"

using namespace logstamp;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream f(path, std::ios::trunc | std::ios::binary);
    f << content;
    return path;
}

} // namespace

TEST_CASE("tokenize splits on whitespace and extra delimiters") {
    TokenizerConfig cfg;
    CHECK(tokenize("Interface te-1/1/50 change state to down", cfg) ==
          std::vector<std::string>{"Interface", "te-1/1/50", "change", "state", "to", "down"});
    CHECK(tokenize("a=b c", cfg) == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize("   ", cfg).empty());
    CHECK(tokenize("", cfg).empty());
    CHECK(tokenize("PacketResponder 1 for block blk_38865049064139660", cfg) ==
          std::vector<std::string>{"PacketResponder", "1", "for", "block",
                                   "blk_38865049064139660"});
    CHECK(tokenize("key=value, list:[a b] (x)", cfg) ==
          std::vector<std::string>{"key", "value", "list", "a", "b", "x"});
}

TEST_CASE("tokenize honors lowercase and custom delimiters") {
    TokenizerConfig cfg;
    cfg.lowercase = true;
    CHECK(tokenize("Hello WORLD", cfg) == std::vector<std::string>{"hello", "world"});
    TokenizerConfig slash;
    slash.extra_delimiters = {'/'};
    CHECK(tokenize("a/b c", slash) == std::vector<std::string>{"a", "b", "c"});
    // whitespace splits regardless of configuration
    TokenizerConfig none;
    none.extra_delimiters.clear();
    CHECK(tokenize("a=b c", none) == std::vector<std::string>{"a=b", "c"});
}

TEST_CASE("tokenize is idempotent over its own space-joined output") {
    TokenizerConfig cfg;
    const std::vector<std::string> inputs = {
        "Interface te-1/1/50 change state to down",
        "key=value, list:[a b] (x)",
        "  padded   input  ",
        "one",
        "a=b=c=d",
    };
    for (const auto& input : inputs) {
        auto tokens = tokenize(input, cfg);
        CHECK(tokenize(join_tokens(tokens), cfg) == tokens);
    }
}

TEST_CASE("load_loghub_csv reads content and truth columns") {
    const std::string path = write_temp(
        "logstamp_corpus_basic.csv",
        "LineId,Content,EventId\n"
        "1,Interface te-1/1/50 change state to down,E1\n"
        "2,\"close, 53 bytes sent\",E1\n"
        "3,PacketResponder 1 for block blk_38865049064139660,E2\n");
    Dataset ds = load_loghub_csv(path, TokenizerConfig{});
    REQUIRE(ds.size() == 3);
    CHECK(ds.labeled);
    CHECK(ds.records[0].tokens[0] == "Interface");
    CHECK(ds.records[1].content == "close, 53 bytes sent");
    CHECK(*ds.records[0].truth_group == "E1");
    CHECK(*ds.records[2].truth_group == "E2");
    CHECK(ds.records[2].id == 2);
    std::remove(path.c_str());
}

TEST_CASE("load_loghub_csv skips empty rows with a counter") {
    const std::string path = write_temp("logstamp_corpus_empty_rows.csv",
                                        "Content,EventId\n"
                                        "hello world,E1\n"
                                        ",E2\n"
                                        "bye,E3\n");
    Dataset ds = load_loghub_csv(path, TokenizerConfig{});
    CHECK(ds.size() == 2);
    CHECK(ds.skipped_empty == 1);
    CHECK(ds.records[1].content == "bye");
    std::remove(path.c_str());
}

TEST_CASE("load_loghub_csv without truth column gives unlabeled dataset") {
    const std::string path = write_temp("logstamp_corpus_unlabeled.csv",
                                        "Content\nfoo bar\nbaz\n");
    Dataset ds = load_loghub_csv(path, TokenizerConfig{});
    CHECK_FALSE(ds.labeled);
    CHECK_FALSE(ds.records[0].truth_group.has_value());
    std::remove(path.c_str());
}

TEST_CASE("load_loghub_csv error paths") {
    CHECK_THROWS_AS(load_loghub_csv("/nonexistent/nowhere.csv", TokenizerConfig{}), Error);
    try {
        load_loghub_csv("/nonexistent/nowhere.csv", TokenizerConfig{});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Input);
    }

    const std::string no_content =
        write_temp("logstamp_no_content.csv", "LineId,EventId\n1,E1\n");
    try {
        load_loghub_csv(no_content, TokenizerConfig{});
        FAIL("expected schema error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Schema);
    }
    std::remove(no_content.c_str());

    const std::string empty = write_temp("logstamp_empty.csv", "");
    try {
        load_loghub_csv(empty, TokenizerConfig{});
        FAIL("expected empty-dataset error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyDataset);
    }
    std::remove(empty.c_str());

    const std::string header_only = write_temp("logstamp_header_only.csv", "Content,EventId\n");
    CHECK_THROWS_AS(load_loghub_csv(header_only, TokenizerConfig{}), Error);
    std::remove(header_only.c_str());
}

TEST_CASE("load_loghub_csv skips undecodable rows") {
    std::string body = "Content\nok line\n";
    body += "bad \xff\xfe bytes\n";
    body += "another ok\n";
    const std::string path = write_temp("logstamp_bad_utf8.csv", body);
    Dataset ds = load_loghub_csv(path, TokenizerConfig{});
    CHECK(ds.size() == 2);
    CHECK(ds.skipped_undecodable == 1);
    std::remove(path.c_str());
}

TEST_CASE("load_loghub_csv supports custom column names") {
    const std::string path = write_temp("logstamp_custom_cols.csv",
                                        "msg,label\nfoo bar,E7\n");
    CsvColumns cols;
    cols.content = "msg";
    cols.truth = "label";
    Dataset ds = load_loghub_csv(path, TokenizerConfig{}, cols);
    CHECK(ds.size() == 1);
    CHECK(*ds.records[0].truth_group == "E7");
    std::remove(path.c_str());
}

TEST_CASE("split_train sizes and determinism") {
    std::vector<std::string> lines;
    std::vector<std::string> truths;
    for (int i = 0; i < 2000; ++i) {
        lines.push_back("line number " + std::to_string(i));
        truths.push_back("E" + std::to_string(i % 7));
    }
    Dataset ds = dataset_from_lines(lines, TokenizerConfig{}, "synthetic", truths);

    auto split = split_train(ds, 0.1, 42);
    CHECK(split.train.size() == 200);
    CHECK(split.test.size() == 2000);

    auto split2 = split_train(ds, 0.1, 42);
    CHECK(split.train_source_ids == split2.train_source_ids);

    auto split3 = split_train(ds, 0.1, 43);
    CHECK(split.train_source_ids != split3.train_source_ids);

    auto full = split_train(ds, 1.0, 0);
    CHECK(full.train.size() == 2000);
    for (int i = 0; i < 2000; ++i) CHECK(full.train_source_ids[static_cast<std::size_t>(i)] == i);

    // train ids are re-indexed contiguous from 0
    for (std::size_t i = 0; i < split.train.size(); ++i)
        CHECK(split.train.records[i].id == static_cast<int>(i));
}

TEST_CASE("split_train rejects bad fractions") {
    Dataset ds = dataset_from_lines({"a b"}, TokenizerConfig{});
    for (double f : {0.0, -0.5, 1.5}) {
        try {
            split_train(ds, f, 0);
            FAIL("expected parameter error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parameter);
        }
    }
    Dataset empty;
    CHECK_THROWS_AS(split_train(empty, 0.5, 0), Error);
}
