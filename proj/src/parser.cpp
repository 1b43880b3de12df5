#include "logstamp/parser.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "logstamp/errors.hpp"
#include "textutil.hpp"

namespace logstamp {

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

Template canonicalize(const std::vector<std::string>& tokens,
                      const std::vector<WordLabel>& labels) {
    if (tokens.empty() || tokens.size() != labels.size())
        throw_error(ErrorKind::Consistency, "canonicalize: token/label length mismatch");
    Template tpl;
    tpl.parts.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        TemplatePart part;
        part.is_placeholder = labels[i] == WordLabel::Variable;
        if (!part.is_placeholder) part.literal = tokens[i];
        if (i) tpl.rendered.push_back(' ');
        tpl.rendered += part.is_placeholder ? kPlaceholder : tokens[i];
        tpl.parts.push_back(std::move(part));
    }
    return tpl;
}

TemplateEntry& TemplateStore::upsert(const std::string& rendered, std::int64_t sequence,
                                     bool& is_new) {
    auto [it, inserted] = entries_.try_emplace(rendered);
    is_new = inserted;
    if (inserted) {
        it->second.template_id = next_id_++;
        it->second.count = 1;
        it->second.first_seen = sequence;
    } else {
        it->second.count++;
    }
    return it->second;
}

const TemplateEntry* TemplateStore::find(const std::string& rendered) const {
    auto it = entries_.find(rendered);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, TemplateEntry>> TemplateStore::sorted_by_id() const {
    std::vector<std::pair<std::string, TemplateEntry>> out(entries_.begin(), entries_.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second.template_id < b.second.template_id; });
    return out;
}

std::optional<ParseResult> parse_line(const EncoderModel& encoder, const TaggerModel& tagger,
                                      TemplateStore& store, const LogRecord& record) {
    if (record.tokens.empty()) return std::nullopt;

    const std::vector<WordLabel> labels = tag(tagger, encoder, record.tokens);
    Template tpl = canonicalize(record.tokens, labels);

    ParseResult result;
    result.record_id = record.id;
    result.rendered = tpl.rendered;
    for (std::size_t i = 0; i < record.tokens.size(); ++i)
        if (labels[i] == WordLabel::Variable)
            result.variables.emplace_back(static_cast<int>(i), record.tokens[i]);

    bool is_new = false;
    const TemplateEntry& entry = store.upsert(tpl.rendered, record.id, is_new);
    result.template_id = entry.template_id;
    result.is_new_template = is_new;
    return result;
}

StreamStats parse_stream(const EncoderModel& encoder, const TaggerModel& tagger,
                         TemplateStore& store, std::istream& lines,
                         const TokenizerConfig& tokenizer,
                         const std::function<void(const ParseResult&)>& sink) {
    StreamStats stats;
    std::string line;
    std::int64_t next_record_id = 0;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        stats.lines_in++;
        if (!detail::valid_utf8(line)) {
            stats.skipped++;
            continue;
        }
        LogRecord record;
        record.id = static_cast<int>(next_record_id);
        record.content = line;
        record.tokens = tokenize(line, tokenizer);
        auto result = parse_line(encoder, tagger, store, record);
        if (!result) {
            stats.skipped++;
            continue;
        }
        result->record_id = next_record_id++;
        stats.results++;
        if (sink) sink(*result);
    }
    return stats;
}

Partition induced_partition(const std::vector<ParseResult>& results) {
    Partition partition;
    partition.groups.reserve(results.size());
    for (const auto& r : results) {
        auto [it, inserted] =
            partition.groups.emplace(static_cast<int>(r.record_id), std::to_string(r.template_id));
        if (!inserted)
            throw_error(ErrorKind::Consistency,
                        "induced_partition: duplicate record id " + std::to_string(r.record_id));
    }
    return partition;
}

void write_parse_result_jsonl(std::ostream& out, const ParseResult& result) {
    nlohmann::json j;
    j["record_id"] = result.record_id;
    j["template_id"] = result.template_id;
    j["template"] = result.rendered;
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& [pos, token] : result.variables)
        vars.push_back({{"position", pos}, {"token", token}});
    j["variables"] = vars;
    j["new"] = result.is_new_template;
    out << j.dump() << '\n';
}

void export_template_store_csv(const std::string& path, const TemplateStore& store) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw_error(ErrorKind::Input, "cannot open for writing: " + path);
    f << "template_id,rendered,count\n";
    for (const auto& [rendered, entry] : store.sorted_by_id())
        f << entry.template_id << ',' << csv_quote(rendered) << ',' << entry.count << '\n';
}

std::vector<StoredTemplate> import_template_store_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw_error(ErrorKind::Input, "cannot open store file: " + path);
    std::string header;
    if (!std::getline(f, header)) throw_error(ErrorKind::Format, "empty store file: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "template_id,rendered,count")
        throw_error(ErrorKind::Format, "unrecognized store header in " + path);

    std::vector<StoredTemplate> out;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        // template_id , quoted-or-bare rendered , count
        std::size_t first_comma = line.find(',');
        std::size_t last_comma = line.rfind(',');
        if (first_comma == std::string::npos || last_comma == first_comma)
            throw_error(ErrorKind::Format, "malformed store row: " + line);
        StoredTemplate st;
        try {
            st.template_id = std::stoi(line.substr(0, first_comma));
            st.count = std::stoll(line.substr(last_comma + 1));
        } catch (const std::exception&) {
            throw_error(ErrorKind::Format, "malformed store row: " + line);
        }
        std::string body = line.substr(first_comma + 1, last_comma - first_comma - 1);
        if (body.size() >= 2 && body.front() == '"' && body.back() == '"') {
            std::string unq;
            for (std::size_t i = 1; i + 1 < body.size(); ++i) {
                if (body[i] == '"' && i + 2 < body.size() && body[i + 1] == '"') {
                    unq.push_back('"');
                    ++i;
                } else {
                    unq.push_back(body[i]);
                }
            }
            st.rendered = std::move(unq);
        } else {
            st.rendered = std::move(body);
        }
        out.push_back(std::move(st));
    }
    return out;
}

} // namespace logstamp
