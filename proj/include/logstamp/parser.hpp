#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "logstamp/eval.hpp"
#include "logstamp/labeler.hpp"
#include "logstamp/tagger.hpp"

namespace logstamp {

inline constexpr const char* kPlaceholder = "<*>";

struct TemplatePart {
    bool is_placeholder = false;
    std::string literal; // empty when placeholder
};

struct Template {
    std::vector<TemplatePart> parts;
    std::string rendered; // parts joined by spaces, placeholders as "<*>"
};

// Each VARIABLE token becomes one placeholder; adjacent placeholders are not
// collapsed, so substituting the variables back reproduces the token list.
Template canonicalize(const std::vector<std::string>& tokens,
                      const std::vector<WordLabel>& labels);

struct TemplateEntry {
    int template_id = 0;
    std::int64_t count = 0;
    std::int64_t first_seen = 0; // sequence number of the first occurrence
};

class TemplateStore {
public:
    // Returns the entry for `rendered`, inserting with the next id when new.
    // `is_new` reports insertion.
    TemplateEntry& upsert(const std::string& rendered, std::int64_t sequence, bool& is_new);

    const TemplateEntry* find(const std::string& rendered) const;
    std::size_t size() const { return entries_.size(); }
    int next_id() const { return next_id_; }

    // (rendered, entry) sorted by template_id
    std::vector<std::pair<std::string, TemplateEntry>> sorted_by_id() const;

private:
    std::unordered_map<std::string, TemplateEntry> entries_;
    int next_id_ = 0;
};

struct ParseResult {
    std::int64_t record_id = 0;
    int template_id = 0;
    std::string rendered;
    std::vector<std::pair<int, std::string>> variables; // (position, token)
    bool is_new_template = false;
};

// Tag, canonicalize, and register one record. Empty records yield nullopt
// and leave the store untouched.
std::optional<ParseResult> parse_line(const EncoderModel& encoder, const TaggerModel& tagger,
                                      TemplateStore& store, const LogRecord& record);

struct StreamStats {
    std::int64_t lines_in = 0;
    std::int64_t results = 0;
    std::int64_t skipped = 0;
};

// Line-at-a-time parsing over a text source. Results arrive in input order;
// the store ends up exactly as after the equivalent parse_line sequence.
StreamStats parse_stream(const EncoderModel& encoder, const TaggerModel& tagger,
                         TemplateStore& store, std::istream& lines,
                         const TokenizerConfig& tokenizer,
                         const std::function<void(const ParseResult&)>& sink);

// record id -> template id, for the evaluation harness.
Partition induced_partition(const std::vector<ParseResult>& results);

void write_parse_result_jsonl(std::ostream& out, const ParseResult& result);

void export_template_store_csv(const std::string& path, const TemplateStore& store);

struct StoredTemplate {
    int template_id = 0;
    std::string rendered;
    std::int64_t count = 0;
};

std::vector<StoredTemplate> import_template_store_csv(const std::string& path);

} // namespace logstamp
