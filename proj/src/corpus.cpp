#include "logstamp/corpus.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "logstamp/errors.hpp"
#include "logstamp/rng.hpp"
#include "textutil.hpp"

namespace logstamp {

namespace {

bool is_delimiter(char c, const TokenizerConfig& config) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isspace(u)) return true;
    return config.extra_delimiters.count(c) > 0;
}

// RFC-4180-ish row reader: quoted fields, doubled quotes, embedded commas and
// newlines. Returns false at end of stream.
bool read_csv_row(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            field.push_back(c);
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

} // namespace

std::vector<std::string> tokenize(const std::string& content, const TokenizerConfig& config) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : content) {
        if (is_delimiter(c, config)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.push_back(config.lowercase ? static_cast<char>(std::tolower(
                                                     static_cast<unsigned char>(c)))
                                               : c);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

Dataset load_loghub_csv(const std::string& path, const TokenizerConfig& config,
                        const CsvColumns& columns, const std::string& dataset_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorKind::Input, "cannot open dataset file: " + path);

    Dataset ds;
    ds.name = dataset_name.empty() ? std::filesystem::path(path).stem().string() : dataset_name;

    std::vector<std::string> header;
    if (!read_csv_row(in, header))
        throw_error(ErrorKind::EmptyDataset, "empty dataset file: " + path);

    const int content_col = find_column(header, columns.content);
    if (content_col < 0)
        throw_error(ErrorKind::Schema,
                    "dataset " + path + " has no '" + columns.content + "' column");
    const int truth_col = find_column(header, columns.truth);

    bool all_labeled = truth_col >= 0;
    std::vector<std::string> fields;
    while (read_csv_row(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        if (static_cast<int>(fields.size()) <= content_col) {
            ds.skipped_undecodable++;
            continue;
        }
        const std::string& content = fields[static_cast<std::size_t>(content_col)];
        if (!detail::valid_utf8(content)) {
            ds.skipped_undecodable++;
            continue;
        }
        std::vector<std::string> tokens = tokenize(content, config);
        if (tokens.empty()) {
            ds.skipped_empty++;
            continue;
        }
        LogRecord rec;
        rec.id = static_cast<int>(ds.records.size());
        rec.content = content;
        rec.tokens = std::move(tokens);
        if (truth_col >= 0 && static_cast<int>(fields.size()) > truth_col &&
            !fields[static_cast<std::size_t>(truth_col)].empty()) {
            rec.truth_group = fields[static_cast<std::size_t>(truth_col)];
        } else {
            all_labeled = false;
        }
        ds.records.push_back(std::move(rec));
    }

    if (ds.records.empty())
        throw_error(ErrorKind::EmptyDataset, "no usable rows in dataset file: " + path);
    ds.labeled = all_labeled;
    return ds;
}

Dataset dataset_from_lines(const std::vector<std::string>& lines, const TokenizerConfig& config,
                           const std::string& name,
                           const std::vector<std::string>& truth_groups) {
    if (!truth_groups.empty() && truth_groups.size() != lines.size())
        throw_error(ErrorKind::Consistency, "truth_groups size does not match lines");
    Dataset ds;
    ds.name = name;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::vector<std::string> tokens = tokenize(lines[i], config);
        if (tokens.empty()) {
            ds.skipped_empty++;
            continue;
        }
        LogRecord rec;
        rec.id = static_cast<int>(ds.records.size());
        rec.content = lines[i];
        rec.tokens = std::move(tokens);
        if (!truth_groups.empty()) rec.truth_group = truth_groups[i];
        ds.records.push_back(std::move(rec));
    }
    ds.labeled = !truth_groups.empty() && !ds.records.empty();
    return ds;
}

TrainTestSplit split_train(const Dataset& dataset, double fraction, std::uint64_t seed) {
    if (dataset.empty()) throw_error(ErrorKind::Input, "split_train: dataset is empty");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw_error(ErrorKind::Parameter, "split_train: fraction must be in (0,1]");

    const int n = static_cast<int>(dataset.size());
    int k = static_cast<int>(std::llround(fraction * n));
    if (k < 1) k = 1;
    if (k > n) k = n;

    Rng rng(seed);
    TrainTestSplit split;
    split.train_source_ids = rng.sample_indices(n, k);

    split.train.name = dataset.name;
    split.train.labeled = dataset.labeled;
    split.train.records.reserve(static_cast<std::size_t>(k));
    for (int src : split.train_source_ids) {
        LogRecord rec = dataset.records[static_cast<std::size_t>(src)];
        rec.id = static_cast<int>(split.train.records.size());
        split.train.records.push_back(std::move(rec));
    }
    split.test = dataset;
    return split;
}

} // namespace logstamp
