#include "embench/synthgen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "embench/backend.hpp"
#include "embench/dedupe.hpp"
#include "embench/loaders.hpp"

using nlohmann::json;

namespace embench {

std::string build_generation_prompt(const std::string& task_description) {
    if (task_description.empty()) throw EmptyTask("task description must be nonempty");
    std::string p;
    p += "You have been assigned a retrieval task: " + task_description + "\n";
    p += "Your mission is to write one text retrieval example for this task in JSON format.\n";
    p += "The JSON object must contain the following keys:\n";
    p += "user_query: a string, a query specified by the retrieval task.\n";
    p += "positive: a string, a relevant document for the user query.\n";
    p += "hard_negative: a string, a document closely related to the query.\n";
    p += "Please adhere to the following guidelines:\n";
    p += "The user_query should be paragraph-based, understandable with some effort or "
         "ambiguity, and diverse in topic. The hard_negative contains some useful information, "
         "but it should be less useful or comprehensive than the positive.";
    return p;
}

namespace {

// First balanced JSON value starting with `open` that actually parses.
std::optional<json> extract_first_json(const std::string& raw, char open, char close) {
    for (size_t start = raw.find(open); start != std::string::npos;
         start = raw.find(open, start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (size_t i = start; i < raw.size(); ++i) {
            char c = raw[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == open) ++depth;
            else if (c == close) {
                if (--depth == 0) {
                    auto candidate = raw.substr(start, i - start + 1);
                    json doc = json::parse(candidate, nullptr, false);
                    if (!doc.is_discarded()) return doc;
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

} // namespace

SyntheticRecord parse_record(const std::string& raw, const std::string& task_description) {
    SyntheticRecord rec;
    rec.task_description = task_description;
    rec.raw_response = raw;

    auto doc = extract_first_json(raw, '{', '}');
    if (!doc || !doc->is_object()) {
        rec.reason = "no json object";
        return rec;
    }
    for (const char* key : {"user_query", "positive", "hard_negative"}) {
        if (!doc->contains(key)) {
            rec.reason = std::string("missing key: ") + key;
            return rec;
        }
        if (!(*doc)[key].is_string()) {
            rec.reason = std::string("non-string field: ") + key;
            return rec;
        }
    }
    rec.user_query = (*doc)["user_query"].get<std::string>();
    rec.positive = (*doc)["positive"].get<std::string>();
    rec.hard_negative = (*doc)["hard_negative"].get<std::string>();

    if (rec.user_query.empty() || rec.positive.empty() || rec.hard_negative.empty()) {
        rec.reason = "empty field";
        return rec;
    }
    if (rec.user_query == rec.positive || rec.user_query == rec.hard_negative ||
        rec.positive == rec.hard_negative) {
        rec.reason = "degenerate pair";
        return rec;
    }
    rec.valid = true;
    return rec;
}

namespace {

size_t codepoints(const std::string& s) {
    size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xc0) != 0x80) ++n;
    return n;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Sentence pieces, each keeping its trailing delimiter. Boundary set:
// '.', '!', newline, U+061F (Arabic question mark), U+06D4 (Urdu full stop).
std::vector<std::string> split_sentences(const std::string& text) {
    static const std::vector<std::string> delims = {".", "!", "\n", "\xd8\x9f", "\xdb\x94"};
    std::vector<std::string> out;
    size_t begin = 0;
    size_t i = 0;
    while (i < text.size()) {
        bool matched = false;
        for (const auto& d : delims) {
            if (text.compare(i, d.size(), d) == 0) {
                out.push_back(text.substr(begin, i + d.size() - begin));
                i += d.size();
                begin = i;
                matched = true;
                break;
            }
        }
        if (!matched) ++i;
    }
    if (begin < text.size()) out.push_back(text.substr(begin));
    return out;
}

// Slices a string into pieces of at most max_cp codepoints.
std::vector<std::string> hard_split(const std::string& s, size_t max_cp) {
    std::vector<std::string> out;
    size_t start = 0, cp = 0, i = 0;
    while (i < s.size()) {
        size_t len = 1;
        unsigned char c = s[i];
        if ((c & 0xe0) == 0xc0) len = 2;
        else if ((c & 0xf0) == 0xe0) len = 3;
        else if ((c & 0xf8) == 0xf0) len = 4;
        if (i + len > s.size()) len = 1;
        if (cp == max_cp) {
            out.push_back(s.substr(start, i - start));
            start = i;
            cp = 0;
        }
        i += len;
        ++cp;
    }
    if (start < s.size()) out.push_back(s.substr(start));
    return out;
}

} // namespace

std::vector<Chunk> chunk_corpus(const std::string& doc_id, const std::string& text,
                                uint64_t max_tokens) {
    const size_t budget_cp = max_tokens * 4;
    std::vector<Chunk> chunks;
    std::string current;
    size_t current_cp = 0;

    auto flush = [&]() {
        std::string body = trim(current);
        current.clear();
        current_cp = 0;
        if (body.empty()) return;
        Chunk c;
        c.source_id = doc_id;
        c.index = chunks.size();
        c.text = std::move(body);
        c.token_estimate = estimate_tokens(c.text);
        chunks.push_back(std::move(c));
    };

    for (const auto& sentence : split_sentences(text)) {
        size_t cp = codepoints(sentence);
        if (cp > budget_cp) {
            flush();
            for (const auto& piece : hard_split(sentence, budget_cp)) {
                current = piece;
                current_cp = codepoints(piece);
                flush();
            }
            continue;
        }
        if (current_cp + cp > budget_cp) flush();
        current += sentence;
        current_cp += cp;
    }
    flush();
    return chunks;
}

QueryGenResult generate_eval_queries(ChatBackend& chat, const Chunk& chunk, size_t styles,
                                     const StyleConfig& config, int max_attempts,
                                     double temperature) {
    std::string prompt = "Read the following passage and write " + std::to_string(styles) +
                         " stylistically distinct search queries, each answerable from the "
                         "passage alone. Use these styles in order:\n";
    for (size_t i = 0; i < styles; ++i)
        prompt += "- " + config.styles[i % config.styles.size()] + "\n";
    prompt += "Reply with a JSON array of " + std::to_string(styles) +
              " strings and nothing else.\n\nPassage:\n" + chunk.text;

    std::optional<json> arr;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::string reply = chat.complete({{"user", prompt}}, temperature);
        arr = extract_first_json(reply, '[', ']');
        if (arr && arr->is_array()) break;
        arr.reset();
    }
    if (!arr) throw GenerationFailed("no JSON array of queries after retries");

    auto normalize = [](const std::string& s) {
        std::string out;
        bool in_space = true;
        for (char c : s) {
            bool sp = c == ' ' || c == '\t' || c == '\n' || c == '\r';
            if (sp) {
                if (!in_space) out.push_back(' ');
                in_space = true;
            } else {
                out.push_back(c);
                in_space = false;
            }
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        return out;
    };

    QueryGenResult result;
    std::set<std::string> seen;
    for (const auto& item : *arr) {
        if (!item.is_string()) continue;
        std::string q = item.get<std::string>();
        if (q.empty()) continue;
        if (!seen.insert(normalize(q)).second) continue;
        result.queries.emplace_back(q, chunk.source_id + "#" + std::to_string(chunk.index));
    }
    result.short_list = result.queries.size() < styles;
    return result;
}

std::vector<SyntheticRecord> filter_records(const std::vector<SyntheticRecord>& records,
                                            double threshold) {
    std::vector<const SyntheticRecord*> valid;
    for (const auto& r : records)
        if (r.valid) valid.push_back(&r);
    if (valid.empty()) return {};

    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(valid.size());
    for (size_t i = 0; i < valid.size(); ++i) {
        char id[24];
        std::snprintf(id, sizeof id, "%08zu", i);
        docs.emplace_back(id, valid[i]->user_query);
    }
    DedupeReport report = dedupe_corpus(docs, threshold);
    std::set<std::string> kept(report.kept.begin(), report.kept.end());

    std::vector<SyntheticRecord> out;
    for (size_t i = 0; i < valid.size(); ++i) {
        if (kept.count(docs[i].first)) out.push_back(*valid[i]);
    }
    return out;
}

std::string record_to_jsonl(const SyntheticRecord& record) {
    json doc;
    doc["task"] = record.task_description;
    doc["user_query"] = record.user_query;
    doc["positive"] = record.positive;
    doc["hard_negative"] = record.hard_negative;
    doc["raw_response"] = record.raw_response;
    doc["valid"] = record.valid;
    doc["reason"] = record.reason;
    return doc.dump();
}

SyntheticRecord record_from_jsonl(const std::string& line) {
    json doc = json::parse(line);
    SyntheticRecord rec;
    rec.task_description = doc.at("task").get<std::string>();
    rec.user_query = doc.value("user_query", "");
    rec.positive = doc.value("positive", "");
    rec.hard_negative = doc.value("hard_negative", "");
    rec.raw_response = doc.value("raw_response", "");
    rec.valid = doc.value("valid", false);
    rec.reason = doc.value("reason", "");
    return rec;
}

std::vector<SyntheticRecord> generate_records(ChatBackend& chat,
                                              const std::string& task_description, size_t count,
                                              const std::string& journal_path,
                                              double temperature) {
    std::vector<SyntheticRecord> records;
    if (std::filesystem::exists(journal_path)) {
        for (const auto& line : read_lines(journal_path)) {
            if (line.empty()) continue;
            records.push_back(record_from_jsonl(line));
        }
    }

    std::ofstream journal(journal_path, std::ios::app);
    if (!journal) throw GenerationFailed("cannot open journal: " + journal_path);

    const std::string prompt = build_generation_prompt(task_description);
    while (records.size() < count) {
        std::string reply = chat.complete({{"user", prompt}}, temperature);
        SyntheticRecord rec = parse_record(reply, task_description);
        journal << record_to_jsonl(rec) << "\n";
        journal.flush();
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace embench
