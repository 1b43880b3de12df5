// logstamp: learn log templates from history, then parse new logs line by
// line. Subcommands: train, parse, eval, inspect.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "logstamp/config.hpp"
#include "logstamp/datagen.hpp"
#include "logstamp/errors.hpp"
#include "logstamp/experiments.hpp"
#include "logstamp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace logstamp;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string content_column = "Content";
    std::string truth_column = "EventId";
    std::uint64_t seed = 0;
    double eps = -1.0;
    int min_pts = -1;
    double tau = -1.0;
    std::string arch;
    // encoder/tagger knobs
    int embed_dim = -1, enc_hidden = -1, enc_epochs = -1;
    long long enc_budget = -1;
    double enc_lr = -1.0, mask_prob = -1.0;
    int tag_hidden = -1, tag_epochs = -1;
    double tag_lr = -1.0;
    bool lowercase = false;
    std::string delimiters = "\x01"; // sentinel: unset
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline config file");
    cmd->add_option("--seed", opts.seed, "master seed (default 0)");
    cmd->add_option("--content-column", opts.content_column, "CSV content column name");
    cmd->add_option("--truth-column", opts.truth_column, "CSV ground-truth column name");
    cmd->add_option("--eps", opts.eps, "DBSCAN cosine-distance radius");
    cmd->add_option("--min-pts", opts.min_pts, "DBSCAN core-point threshold");
    cmd->add_option("--tau", opts.tau, "pseudo-label frequency threshold");
    cmd->add_option("--arch", opts.arch,
                    "tagger architecture: recurrent_bidir|recurrent_unidir|convolutional");
    cmd->add_option("--embed-dim", opts.embed_dim, "encoder embedding width");
    cmd->add_option("--encoder-hidden", opts.enc_hidden, "encoder hidden width");
    cmd->add_option("--encoder-epochs", opts.enc_epochs, "encoder training epochs");
    cmd->add_option("--encoder-budget", opts.enc_budget,
                    "cap on encoder line visits across epochs (0 = no cap)");
    cmd->add_option("--encoder-lr", opts.enc_lr, "encoder learning rate");
    cmd->add_option("--mask-prob", opts.mask_prob, "masked-token probability");
    cmd->add_option("--tagger-hidden", opts.tag_hidden, "tagger hidden width");
    cmd->add_option("--tagger-epochs", opts.tag_epochs, "tagger training epochs");
    cmd->add_option("--tagger-lr", opts.tag_lr, "tagger learning rate");
    cmd->add_flag("--lowercase", opts.lowercase, "lowercase tokens");
    cmd->add_option("--delimiters", opts.delimiters,
                    "extra delimiter characters in addition to whitespace");
}

// defaults -> config file -> explicit flags (flags win)
PipelineConfig resolve_config(const CommonOpts& opts, const CLI::App* cmd) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = load_pipeline_config(opts.config_path);
    if (cmd->count("--eps")) cfg.dbscan.eps = opts.eps;
    if (cmd->count("--min-pts")) cfg.dbscan.min_pts = opts.min_pts;
    if (cmd->count("--tau")) cfg.labeler.tau = opts.tau;
    if (cmd->count("--arch")) cfg.tagger.architecture = tagger_arch_from_name(opts.arch);
    if (cmd->count("--embed-dim")) cfg.encoder.embed_dim = opts.embed_dim;
    if (cmd->count("--encoder-hidden")) cfg.encoder.hidden_dim = opts.enc_hidden;
    if (cmd->count("--encoder-epochs")) cfg.encoder.epochs = opts.enc_epochs;
    if (cmd->count("--encoder-budget")) cfg.encoder.max_line_visits = opts.enc_budget;
    if (cmd->count("--encoder-lr")) cfg.encoder.learning_rate = opts.enc_lr;
    if (cmd->count("--mask-prob")) cfg.encoder.mask_probability = opts.mask_prob;
    if (cmd->count("--tagger-hidden")) cfg.tagger.hidden_dim = opts.tag_hidden;
    if (cmd->count("--tagger-epochs")) cfg.tagger.epochs = opts.tag_epochs;
    if (cmd->count("--tagger-lr")) cfg.tagger.learning_rate = opts.tag_lr;
    if (cmd->count("--lowercase")) cfg.tokenizer.lowercase = true;
    if (cmd->count("--delimiters")) {
        cfg.tokenizer.extra_delimiters.clear();
        for (char c : opts.delimiters) cfg.tokenizer.extra_delimiters.insert(c);
    }
    if (cmd->count("--seed") || opts.config_path.empty()) cfg.apply_seed(opts.seed);
    cfg.validate();
    return cfg;
}

Dataset load_dataset(const std::string& path, const PipelineConfig& cfg,
                     const CommonOpts& opts) {
    CsvColumns columns;
    columns.content = opts.content_column;
    columns.truth = opts.truth_column;
    return load_loghub_csv(path, cfg.tokenizer, columns);
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw_error(ErrorKind::Input, "cannot open for writing: " + path);
    f << body;
}

void print_label_stats(const LabelStatistics& stats) {
    std::cout << "pseudo-labels: " << stats.records_labeled << " records ("
              << stats.records_noise << " noise, fraction " << stats.noise_fraction << ")\n";
    std::cout << "tokens: " << stats.template_tokens << " TEMPLATE, " << stats.variable_tokens
              << " VARIABLE across " << stats.per_cluster.size() << " clusters\n";
    if (stats.template_tokens == 0 || stats.variable_tokens == 0)
        std::cerr << "warning: single-class pseudo-labels; the clustering is degenerate, try a "
                     "smaller --eps, more --encoder-epochs, or a different --tau\n";
}

int cmd_train(const std::string& dataset_path, double fraction, const std::string& out_dir,
              const CommonOpts& opts, const CLI::App* cmd) {
    PipelineConfig cfg = resolve_config(opts, cmd);
    Dataset dataset = load_dataset(dataset_path, cfg, opts);
    fs::create_directories(out_dir);

    TrainTestSplit split = split_train(dataset, fraction, cfg.split_seed());
    std::cout << "training on " << split.train.size() << " of " << dataset.size()
              << " records (fraction " << fraction << ", seed " << cfg.seed << ")\n";

    const auto start = std::chrono::steady_clock::now();
    TrainedPipeline pipeline = train_offline(split.train, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string encoder_path = (fs::path(out_dir) / "encoder.bin").string();
    const std::string tagger_path = (fs::path(out_dir) / "tagger.bin").string();
    save_encoder(pipeline.encoder, encoder_path);
    save_tagger(pipeline.tagger, tagger_path);
    write_labeled_jsonl((fs::path(out_dir) / "labeled.jsonl").string(), pipeline.labeled);
    write_text_file((fs::path(out_dir) / "pipeline.ini").string(), render_pipeline_config(cfg));

    nlohmann::json report;
    report["dataset"] = dataset.name;
    report["fraction"] = fraction;
    report["seed"] = cfg.seed;
    report["config"] = config_to_json(cfg);
    report["train_records"] = split.train.size();
    report["clusters"] = pipeline.assignment.num_clusters;
    report["noise_fraction"] = pipeline.label_stats.noise_fraction;
    report["encoder_final_loss"] = pipeline.encoder.meta.final_loss;
    report["tagger_final_loss"] = pipeline.tagger.meta.final_loss;
    report["tagger_train_accuracy"] = pipeline.tagger.meta.train_accuracy;
    report["runtime_seconds"] = secs;
    write_text_file((fs::path(out_dir) / "train_report.json").string(), report.dump(2) + "\n");

    std::cout << "encoder mean loss per epoch:";
    for (double loss : pipeline.encoder.meta.epoch_losses) std::cout << " " << loss;
    std::cout << "\n";
    print_label_stats(pipeline.label_stats);
    std::cout << "clusters: " << pipeline.assignment.num_clusters
              << ", tagger train accuracy: " << pipeline.tagger.meta.train_accuracy << "\n";
    std::cout << "models written to " << out_dir << " (" << secs << "s)\n";
    return 0;
}

int cmd_parse(const std::string& model_dir, const std::string& input,
              const std::string& output, const std::string& store_out,
              const CommonOpts& opts, const CLI::App* cmd) {
    CommonOpts resolved_opts = opts;
    if (resolved_opts.config_path.empty()) {
        const std::string pipeline_ini = (fs::path(model_dir) / "pipeline.ini").string();
        if (fs::exists(pipeline_ini)) resolved_opts.config_path = pipeline_ini;
    }
    PipelineConfig cfg = resolve_config(resolved_opts, cmd);

    EncoderModel encoder = load_encoder((fs::path(model_dir) / "encoder.bin").string());
    TaggerModel tagger = load_tagger((fs::path(model_dir) / "tagger.bin").string());

    std::ifstream file_in;
    std::istream* in = &std::cin;
    if (input != "-") {
        file_in.open(input, std::ios::binary);
        if (!file_in) throw_error(ErrorKind::Input, "cannot open input: " + input);
        in = &file_in;
    }
    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (output != "-") {
        file_out.open(output, std::ios::trunc);
        if (!file_out) throw_error(ErrorKind::Input, "cannot open output: " + output);
        out = &file_out;
    }

    TemplateStore store;
    const auto start = std::chrono::steady_clock::now();
    StreamStats stats = parse_stream(encoder, tagger, store, *in, cfg.tokenizer,
                                     [&](const ParseResult& r) { write_parse_result_jsonl(*out, r); });
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!store_out.empty()) export_template_store_csv(store_out, store);

    std::cerr << "parsed " << stats.results << " lines (" << stats.skipped << " skipped), "
              << store.size() << " templates, "
              << (secs > 0 ? static_cast<double>(stats.results) / secs : 0.0) << " lines/s\n";
    return 0;
}

void print_report_line(const ExperimentReport& r) {
    std::cout << "  " << r.dataset << "  fraction=" << r.fraction
              << "  rand_index=" << r.rand_index << "  templates=" << r.num_templates_predicted
              << "/" << r.num_templates_truth << "  arch="
              << tagger_arch_name(r.config.tagger.architecture) << "\n";
}

std::string report_file_name(const ExperimentReport& r, const std::string& mode) {
    std::ostringstream name;
    name << "report_" << mode << "_" << r.dataset << "_f"
         << static_cast<int>(r.fraction * 100 + 0.5);
    if (mode == "ablation") name << "_" << tagger_arch_name(r.config.tagger.architecture);
    name << ".json";
    return name.str();
}

int cmd_eval(const std::vector<std::string>& dataset_paths, const std::string& mode,
             double fraction, const std::string& out_dir, const CommonOpts& opts,
             const CLI::App* cmd) {
    PipelineConfig cfg = resolve_config(opts, cmd);
    fs::create_directories(out_dir);

    std::vector<ExperimentReport> all;
    for (const auto& path : dataset_paths) {
        Dataset dataset = load_dataset(path, cfg, opts);
        if (!dataset.labeled)
            throw_error(ErrorKind::Input, "eval requires a labeled dataset: " + path);

        std::vector<ExperimentReport> reports;
        if (mode == "offline") {
            reports.push_back(run_offline_experiment(dataset, cfg));
        } else if (mode == "online") {
            reports.push_back(run_online_experiment(dataset, fraction, cfg.seed, cfg));
        } else if (mode == "sweep") {
            reports = run_fraction_sweep(dataset, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9},
                                         cfg.seed, cfg);
        } else if (mode == "ablation") {
            reports = run_tagger_ablation(dataset, fraction, cfg.seed, cfg);
        } else {
            throw_error(ErrorKind::Parameter, "unknown eval mode: " + mode);
        }

        for (const auto& r : reports) {
            print_report_line(r);
            write_text_file((fs::path(out_dir) / report_file_name(r, mode)).string(),
                            report_to_json(r).dump(2) + "\n");
        }
        if (mode == "sweep") {
            nlohmann::json curve = nlohmann::json::array();
            for (const auto& r : reports)
                curve.push_back({{"fraction", r.fraction}, {"rand_index", r.rand_index}});
            write_text_file((fs::path(out_dir) / ("curve_" + dataset.name + ".json")).string(),
                            curve.dump(2) + "\n");
        }
        all.insert(all.end(), reports.begin(), reports.end());
    }

    if (mode == "online" && dataset_paths.size() > 1) {
        double sum = 0.0;
        for (const auto& r : all) sum += r.rand_index;
        std::cout << "average rand_index over " << all.size()
                  << " datasets: " << sum / static_cast<double>(all.size()) << "\n";
    }
    std::cout << "reports written to " << out_dir << "\n";
    return 0;
}

int cmd_inspect(const std::string& store_path) {
    auto rows = import_template_store_csv(store_path);
    std::sort(rows.begin(), rows.end(), [](const StoredTemplate& a, const StoredTemplate& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.template_id < b.template_id;
    });
    std::cout << "template_id  count  rendered\n";
    for (const auto& row : rows)
        std::cout << row.template_id << "  " << row.count << "  " << row.rendered << "\n";
    return 0;
}

int cmd_datagen(const std::string& out_dir, int lines, std::uint64_t seed) {
    fs::create_directories(out_dir);
    for (const auto& name : synthetic_dataset_names()) {
        const std::string path = (fs::path(out_dir) / (name + ".csv")).string();
        write_synthetic_csv(path, name, lines, seed);
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"log template mining via sequence labelling"};
    app.require_subcommand(1);

    CommonOpts train_opts, parse_opts, eval_opts;

    auto* train = app.add_subcommand("train", "run the offline pipeline and save models");
    std::string train_dataset, train_out = "runs/latest";
    double train_fraction = 1.0;
    train->add_option("--dataset", train_dataset, "structured CSV dataset")->required();
    train->add_option("--fraction", train_fraction, "training fraction in (0,1]");
    train->add_option("--out-dir", train_out, "output directory");
    add_common_flags(train, train_opts);

    auto* parse = app.add_subcommand("parse", "parse logs line by line with trained models");
    std::string parse_models = "runs/latest", parse_input = "-", parse_output = "-",
                parse_store;
    parse->add_option("--model-dir", parse_models, "directory holding encoder.bin/tagger.bin");
    parse->add_option("--input", parse_input, "input log file, '-' for stdin");
    parse->add_option("--output", parse_output, "JSONL output, '-' for stdout");
    parse->add_option("--store-out", parse_store, "template store CSV export path");
    add_common_flags(parse, parse_opts);

    auto* eval = app.add_subcommand("eval", "run evaluation experiments against ground truth");
    std::vector<std::string> eval_datasets;
    std::string eval_mode = "online", eval_out = "runs/eval";
    double eval_fraction = 0.1;
    eval->add_option("--dataset", eval_datasets, "labeled dataset(s)")->required();
    eval->add_option("--mode", eval_mode, "offline|online|sweep|ablation");
    eval->add_option("--fraction", eval_fraction, "training fraction for online/ablation");
    eval->add_option("--out-dir", eval_out, "report output directory");
    add_common_flags(eval, eval_opts);

    auto* inspect = app.add_subcommand("inspect", "list templates from a store export");
    std::string inspect_store;
    inspect->add_option("--store", inspect_store, "template store CSV")->required();

    auto* datagen = app.add_subcommand("datagen", "write the bundled benchmark corpora");
    std::string datagen_out = "data/synthetic";
    int datagen_lines = 2000;
    std::uint64_t datagen_seed = 123;
    datagen->add_option("--out-dir", datagen_out, "output directory");
    datagen->add_option("--lines", datagen_lines, "lines per dataset");
    datagen->add_option("--seed", datagen_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (train->parsed())
            return cmd_train(train_dataset, train_fraction, train_out, train_opts, train);
        if (parse->parsed())
            return cmd_parse(parse_models, parse_input, parse_output, parse_store, parse_opts,
                             parse);
        if (eval->parsed())
            return cmd_eval(eval_datasets, eval_mode, eval_fraction, eval_out, eval_opts, eval);
        if (inspect->parsed()) return cmd_inspect(inspect_store);
        if (datagen->parsed()) return cmd_datagen(datagen_out, datagen_lines, datagen_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
