// Python bindings for the core operations: tokenization, dataset handling,
// pipeline training, online parsing, clustering, and the RandIndex metric.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>
#include <optional>

#include "logstamp/config.hpp"
#include "logstamp/datagen.hpp"
#include "logstamp/errors.hpp"
#include "logstamp/experiments.hpp"
#include "logstamp/pipeline.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace logstamp;

namespace {

TokenizerConfig tokenizer_from(const std::string& extra_delimiters, bool lowercase) {
    TokenizerConfig cfg;
    cfg.extra_delimiters.clear();
    for (char c : extra_delimiters) cfg.extra_delimiters.insert(c);
    cfg.lowercase = lowercase;
    return cfg;
}

PipelineConfig config_from_kwargs(const py::kwargs& kwargs) {
    PipelineConfig cfg;
    std::uint64_t seed = 0;
    for (const auto& item : kwargs) {
        const std::string key = py::cast<std::string>(item.first);
        const py::handle value = item.second;
        if (key == "eps") cfg.dbscan.eps = py::cast<double>(value);
        else if (key == "min_pts") cfg.dbscan.min_pts = py::cast<int>(value);
        else if (key == "tau") cfg.labeler.tau = py::cast<double>(value);
        else if (key == "count_mode")
            cfg.labeler.count_mode = py::cast<std::string>(value) == "positional"
                                         ? CountMode::Positional
                                         : CountMode::Document;
        else if (key == "arch")
            cfg.tagger.architecture = tagger_arch_from_name(py::cast<std::string>(value));
        else if (key == "embed_dim") cfg.encoder.embed_dim = py::cast<int>(value);
        else if (key == "encoder_hidden") cfg.encoder.hidden_dim = py::cast<int>(value);
        else if (key == "encoder_epochs") cfg.encoder.epochs = py::cast<int>(value);
        else if (key == "encoder_lr") cfg.encoder.learning_rate = py::cast<double>(value);
        else if (key == "mask_prob") cfg.encoder.mask_probability = py::cast<double>(value);
        else if (key == "max_vocab") cfg.encoder.max_vocab = py::cast<int>(value);
        else if (key == "min_token_count") cfg.encoder.min_token_count = py::cast<int>(value);
        else if (key == "encoder_budget") cfg.encoder.max_line_visits = py::cast<std::int64_t>(value);
        else if (key == "tagger_hidden") cfg.tagger.hidden_dim = py::cast<int>(value);
        else if (key == "tagger_epochs") cfg.tagger.epochs = py::cast<int>(value);
        else if (key == "tagger_lr") cfg.tagger.learning_rate = py::cast<double>(value);
        else if (key == "lowercase") cfg.tokenizer.lowercase = py::cast<bool>(value);
        else if (key == "extra_delimiters") {
            cfg.tokenizer.extra_delimiters.clear();
            for (char c : py::cast<std::string>(value)) cfg.tokenizer.extra_delimiters.insert(c);
        } else if (key == "seed") seed = py::cast<std::uint64_t>(value);
        else throw_error(ErrorKind::Parameter, "unknown config option: " + key);
    }
    cfg.apply_seed(seed);
    cfg.validate();
    return cfg;
}

py::dict result_to_dict(const ParseResult& r) {
    py::dict d;
    d["record_id"] = r.record_id;
    d["template_id"] = r.template_id;
    d["template"] = r.rendered;
    py::list vars;
    for (const auto& [pos, tok] : r.variables) vars.append(py::make_tuple(pos, tok));
    d["variables"] = vars;
    d["new"] = r.is_new_template;
    return d;
}

// a trained pipeline plus its online template store
class Pipeline {
public:
    Pipeline(EncoderModel encoder, TaggerModel tagger, PipelineConfig config)
        : encoder_(std::move(encoder)), tagger_(std::move(tagger)), config_(std::move(config)) {}

    static Pipeline train(const Dataset& dataset, const py::kwargs& kwargs) {
        PipelineConfig cfg = config_from_kwargs(kwargs);
        TrainedPipeline trained = train_offline(dataset, cfg);
        return Pipeline(std::move(trained.encoder), std::move(trained.tagger), std::move(cfg));
    }

    py::dict parse_line_text(const std::string& line) {
        LogRecord rec;
        rec.id = static_cast<int>(next_id_);
        rec.content = line;
        rec.tokens = tokenize(line, config_.tokenizer);
        auto result = parse_line(encoder_, tagger_, store_, rec);
        if (!result) throw_error(ErrorKind::Input, "empty line");
        ++next_id_;
        return result_to_dict(*result);
    }

    py::list parse_many(const std::vector<std::string>& lines) {
        py::list out;
        for (const auto& line : lines) {
            LogRecord rec;
            rec.id = static_cast<int>(next_id_);
            rec.content = line;
            rec.tokens = tokenize(line, config_.tokenizer);
            auto result = parse_line(encoder_, tagger_, store_, rec);
            if (!result) continue;
            ++next_id_;
            out.append(result_to_dict(*result));
        }
        return out;
    }

    std::vector<std::string> tag_line(const std::string& line) {
        const auto tokens = tokenize(line, config_.tokenizer);
        std::vector<std::string> out;
        for (WordLabel l : tag(tagger_, encoder_, tokens)) out.emplace_back(word_label_name(l));
        return out;
    }

    std::vector<std::vector<float>> embed(const std::string& line) {
        return embed_tokens(encoder_, tokenize(line, config_.tokenizer));
    }

    std::vector<float> embed_line(const std::string& line) {
        return embed_sentence(encoder_, tokenize(line, config_.tokenizer)).vector;
    }

    py::list templates() const {
        py::list out;
        for (const auto& [rendered, entry] : store_.sorted_by_id()) {
            py::dict d;
            d["template_id"] = entry.template_id;
            d["template"] = rendered;
            d["count"] = entry.count;
            out.append(d);
        }
        return out;
    }

    void reset_store() {
        store_ = TemplateStore();
        next_id_ = 0;
    }

    void save(const std::string& dir) const {
        fs::create_directories(dir);
        save_encoder(encoder_, (fs::path(dir) / "encoder.bin").string());
        save_tagger(tagger_, (fs::path(dir) / "tagger.bin").string());
        std::ofstream ini((fs::path(dir) / "pipeline.ini").string(), std::ios::trunc);
        ini << render_pipeline_config(config_);
    }

    static Pipeline load(const std::string& dir) {
        PipelineConfig cfg;
        const std::string ini = (fs::path(dir) / "pipeline.ini").string();
        if (fs::exists(ini)) cfg = load_pipeline_config(ini);
        return Pipeline(load_encoder((fs::path(dir) / "encoder.bin").string()),
                        load_tagger((fs::path(dir) / "tagger.bin").string()), cfg);
    }

private:
    EncoderModel encoder_;
    TaggerModel tagger_;
    PipelineConfig config_;
    TemplateStore store_;
    std::int64_t next_id_ = 0;
};

} // namespace

PYBIND11_MODULE(_logstamp, m) {
    m.doc() = "log template mining via sequence labelling";

    py::register_exception<Error>(m, "LogstampError");

    py::class_<LogRecord>(m, "Record")
        .def_readonly("id", &LogRecord::id)
        .def_readonly("content", &LogRecord::content)
        .def_readonly("tokens", &LogRecord::tokens)
        .def_property_readonly("truth_group",
                               [](const LogRecord& r) -> py::object {
                                   if (!r.truth_group) return py::none();
                                   return py::str(*r.truth_group);
                               })
        .def("__repr__", [](const LogRecord& r) {
            return "<Record id=" + std::to_string(r.id) + ">";
        });

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("name", &Dataset::name)
        .def_readonly("labeled", &Dataset::labeled)
        .def_readonly("records", &Dataset::records)
        .def_readonly("skipped_empty", &Dataset::skipped_empty)
        .def("__len__", &Dataset::size)
        .def("__repr__", [](const Dataset& d) {
            return "<Dataset " + d.name + " n=" + std::to_string(d.size()) + ">";
        });

    m.def(
        "tokenize",
        [](const std::string& text, const std::string& extra_delimiters, bool lowercase) {
            return tokenize(text, tokenizer_from(extra_delimiters, lowercase));
        },
        py::arg("text"), py::arg("extra_delimiters") = "=,:()[]", py::arg("lowercase") = false,
        "Split text into tokens on whitespace plus the extra delimiters.");

    m.def(
        "load_dataset",
        [](const std::string& path, const std::string& content_column,
           const std::string& truth_column, const std::string& extra_delimiters,
           bool lowercase) {
            CsvColumns columns;
            columns.content = content_column;
            columns.truth = truth_column;
            return load_loghub_csv(path, tokenizer_from(extra_delimiters, lowercase), columns);
        },
        py::arg("path"), py::arg("content_column") = "Content",
        py::arg("truth_column") = "EventId", py::arg("extra_delimiters") = "=,:()[]",
        py::arg("lowercase") = false, "Load a structured CSV dataset.");

    m.def(
        "make_dataset",
        [](const std::vector<std::string>& lines, const std::vector<std::string>& truths,
           const std::string& name) {
            return dataset_from_lines(lines, TokenizerConfig{}, name, truths);
        },
        py::arg("lines"), py::arg("truths") = std::vector<std::string>{},
        py::arg("name") = "inline", "Build a dataset from raw lines.");

    m.def(
        "generate_synthetic",
        [](const std::string& name, int lines, std::uint64_t seed) {
            return generate_synthetic_dataset(name, lines, seed, TokenizerConfig{});
        },
        py::arg("name"), py::arg("lines") = 2000, py::arg("seed") = 123,
        "Generate a bundled benchmark corpus (HDFS, Proxifier, Zookeeper, BGL, Hadoop).");

    m.def(
        "split_train",
        [](const Dataset& dataset, double fraction, std::uint64_t seed) {
            TrainTestSplit split = split_train(dataset, fraction, seed);
            return py::make_tuple(split.train, split.test, split.train_source_ids);
        },
        py::arg("dataset"), py::arg("fraction"), py::arg("seed") = 0,
        "Sample a training split; returns (train, test, source_ids).");

    m.def(
        "dbscan",
        [](const std::vector<std::vector<float>>& points, double eps, int min_pts) {
            DbscanConfig cfg;
            cfg.eps = eps;
            cfg.min_pts = min_pts;
            ClusterAssignment a = logstamp::dbscan(points, cfg);
            return py::make_tuple(a.labels, a.num_clusters);
        },
        py::arg("points"), py::arg("eps") = 0.05, py::arg("min_pts") = 2,
        "Density clustering over unit vectors; returns (labels, num_clusters), noise = -1.");

    m.def(
        "pair_counts",
        [](const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
            ConfusionCounts c =
                pair_counts(Partition::from_labels(predicted), Partition::from_labels(truth));
            py::dict d;
            d["tp"] = c.tp;
            d["tn"] = c.tn;
            d["fp"] = c.fp;
            d["fn"] = c.fn;
            return d;
        },
        py::arg("predicted"), py::arg("truth"),
        "Pair confusion counts between two groupings given as per-record labels.");

    m.def(
        "rand_index",
        [](const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
            return rand_index(
                pair_counts(Partition::from_labels(predicted), Partition::from_labels(truth)));
        },
        py::arg("predicted"), py::arg("truth"), "RandIndex between two groupings.");

    m.def(
        "run_experiment",
        [](const Dataset& dataset, double fraction, const py::kwargs& kwargs) {
            PipelineConfig cfg = config_from_kwargs(kwargs);
            ExperimentReport report =
                run_online_experiment(dataset, fraction, cfg.seed, cfg);
            return py::module_::import("json").attr("loads")(report_to_json(report).dump());
        },
        py::arg("dataset"), py::arg("fraction") = 1.0,
        "Train on a fraction, parse everything, and score RandIndex against ground truth.");

    py::class_<Pipeline>(m, "Pipeline")
        .def(py::init(&Pipeline::train), py::arg("dataset"),
             "Train the offline pipeline on a dataset.")
        .def("parse_line", &Pipeline::parse_line_text, py::arg("line"),
             "Parse one line; updates the online template store.")
        .def("parse", &Pipeline::parse_many, py::arg("lines"), "Parse lines in order.")
        .def("tag", &Pipeline::tag_line, py::arg("line"), "Per-token T/V labels.")
        .def("embed_tokens", &Pipeline::embed, py::arg("line"), "Contextual token vectors.")
        .def("embed_sentence", &Pipeline::embed_line, py::arg("line"),
             "Unit-norm sentence vector.")
        .def("templates", &Pipeline::templates, "Current template store contents.")
        .def("reset_store", &Pipeline::reset_store, "Clear the online template store.")
        .def("save", &Pipeline::save, py::arg("directory"))
        .def_static("load", &Pipeline::load, py::arg("directory"));
}
