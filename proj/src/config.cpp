#include "logstamp/config.hpp"

#include <fstream>
#include <sstream>

#include "logstamp/errors.hpp"
#include "logstamp/tagger.hpp"

namespace logstamp {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& value, const std::string& where) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw_error(ErrorKind::Parameter, "config: bad boolean for " + where + ": " + value);
}

int parse_int(const std::string& value, const std::string& where) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw_error(ErrorKind::Parameter, "config: bad integer for " + where + ": " + value);
    }
}

double parse_double(const std::string& value, const std::string& where) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw_error(ErrorKind::Parameter, "config: bad number for " + where + ": " + value);
    }
}

std::uint64_t parse_u64(const std::string& value, const std::string& where) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw_error(ErrorKind::Parameter, "config: bad seed for " + where + ": " + value);
    }
}

} // namespace

void apply_config_line(PipelineConfig& config, const std::string& section,
                       const std::string& key, const std::string& value) {
    const std::string where = section + "." + key;
    if (section == "tokenizer") {
        if (key == "extra_delimiters") {
            config.tokenizer.extra_delimiters.clear();
            for (char c : value) config.tokenizer.extra_delimiters.insert(c);
            return;
        }
        if (key == "lowercase") {
            config.tokenizer.lowercase = parse_bool(value, where);
            return;
        }
    } else if (section == "encoder") {
        if (key == "embed_dim") { config.encoder.embed_dim = parse_int(value, where); return; }
        if (key == "hidden_dim") { config.encoder.hidden_dim = parse_int(value, where); return; }
        if (key == "epochs") { config.encoder.epochs = parse_int(value, where); return; }
        if (key == "learning_rate") { config.encoder.learning_rate = parse_double(value, where); return; }
        if (key == "mask_probability") { config.encoder.mask_probability = parse_double(value, where); return; }
        if (key == "max_vocab") { config.encoder.max_vocab = parse_int(value, where); return; }
        if (key == "min_token_count") { config.encoder.min_token_count = parse_int(value, where); return; }
        if (key == "max_line_visits") { config.encoder.max_line_visits = parse_int(value, where); return; }
    } else if (section == "dbscan") {
        if (key == "eps") { config.dbscan.eps = parse_double(value, where); return; }
        if (key == "min_pts") { config.dbscan.min_pts = parse_int(value, where); return; }
    } else if (section == "labeler") {
        if (key == "tau") { config.labeler.tau = parse_double(value, where); return; }
        if (key == "count_mode") {
            if (value == "document") { config.labeler.count_mode = CountMode::Document; return; }
            if (value == "positional") { config.labeler.count_mode = CountMode::Positional; return; }
            throw_error(ErrorKind::Parameter, "config: bad count_mode: " + value);
        }
    } else if (section == "tagger") {
        if (key == "architecture") { config.tagger.architecture = tagger_arch_from_name(value); return; }
        if (key == "hidden_dim") { config.tagger.hidden_dim = parse_int(value, where); return; }
        if (key == "epochs") { config.tagger.epochs = parse_int(value, where); return; }
        if (key == "learning_rate") { config.tagger.learning_rate = parse_double(value, where); return; }
    } else if (section == "run") {
        if (key == "seed") { config.apply_seed(parse_u64(value, where)); return; }
    } else {
        throw_error(ErrorKind::Parameter, "config: unknown section [" + section + "]");
    }
    throw_error(ErrorKind::Parameter, "config: unknown key " + where);
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw_error(ErrorKind::Input, "cannot open config file: " + path);

    PipelineConfig config;
    config.apply_seed(0); // sub-seeds derive from the master even when [run] is absent
    std::string line, section;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw_error(ErrorKind::Parameter,
                            "config: malformed section at line " + std::to_string(lineno));
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw_error(ErrorKind::Parameter,
                        "config: expected key=value at line " + std::to_string(lineno));
        if (section.empty())
            throw_error(ErrorKind::Parameter,
                        "config: key outside any section at line " + std::to_string(lineno));
        apply_config_line(config, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    config.validate();
    return config;
}

std::string render_pipeline_config(const PipelineConfig& config) {
    std::ostringstream out;
    std::string delims;
    for (char c : config.tokenizer.extra_delimiters) delims.push_back(c);
    out << "[tokenizer]\n";
    out << "extra_delimiters = " << delims << "\n";
    out << "lowercase = " << (config.tokenizer.lowercase ? "true" : "false") << "\n";
    out << "[encoder]\n";
    out << "embed_dim = " << config.encoder.embed_dim << "\n";
    out << "hidden_dim = " << config.encoder.hidden_dim << "\n";
    out << "epochs = " << config.encoder.epochs << "\n";
    out << "learning_rate = " << config.encoder.learning_rate << "\n";
    out << "mask_probability = " << config.encoder.mask_probability << "\n";
    out << "max_vocab = " << config.encoder.max_vocab << "\n";
    out << "min_token_count = " << config.encoder.min_token_count << "\n";
    out << "max_line_visits = " << config.encoder.max_line_visits << "\n";
    out << "[dbscan]\n";
    out << "eps = " << config.dbscan.eps << "\n";
    out << "min_pts = " << config.dbscan.min_pts << "\n";
    out << "[labeler]\n";
    out << "tau = " << config.labeler.tau << "\n";
    out << "count_mode = "
        << (config.labeler.count_mode == CountMode::Document ? "document" : "positional") << "\n";
    out << "[tagger]\n";
    out << "architecture = " << tagger_arch_name(config.tagger.architecture) << "\n";
    out << "hidden_dim = " << config.tagger.hidden_dim << "\n";
    out << "epochs = " << config.tagger.epochs << "\n";
    out << "learning_rate = " << config.tagger.learning_rate << "\n";
    out << "[run]\n";
    out << "seed = " << config.seed << "\n";
    return out.str();
}

} // namespace logstamp
