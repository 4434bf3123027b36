// Command-line front end: benchmark runs, ad-hoc embedding into cache files,
// hard-negative mining, dedupe reports, synthetic generation, corpus chunking
// and report rendering.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "embench/backend.hpp"
#include "embench/cache.hpp"
#include "embench/dedupe.hpp"
#include "embench/engine.hpp"
#include "embench/fixtures.hpp"
#include "embench/loaders.hpp"
#include "embench/mining.hpp"
#include "embench/remote.hpp"
#include "embench/runner.hpp"
#include "embench/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 2;
constexpr int kExitConfigError = 3;

void write_or_print(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    fs::path p(out_path);
    if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

embench::BackendSpec select_backend(const std::string& config_path, const std::string& backend_id,
                                    size_t dim, uint64_t seed) {
    if (config_path.empty()) {
        embench::BackendSpec spec;
        spec.id = "hash" + std::to_string(dim);
        spec.kind = "hash";
        spec.model_name = "hash-embedder-" + std::to_string(dim);
        spec.dim = dim;
        spec.seed = seed;
        return spec;
    }
    auto config = embench::load_run_config(config_path);
    for (const auto& spec : config.backends)
        if (backend_id.empty() || spec.id == backend_id) return spec;
    throw embench::ConfigError("backend \"" + backend_id + "\" not found in " + config_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-task text-embedding benchmark engine"};
    app.require_subcommand(1);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run the benchmark described by a config file");
    std::string eval_config;
    eval_cmd->add_option("--config", eval_config, "Run config JSON")->required();

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Embed a corpus into a cache file");
    std::string embed_config, embed_backend, embed_in, embed_out;
    embed_cmd->add_option("--config", embed_config, "Run config JSON defining backends");
    embed_cmd->add_option("--backend", embed_backend, "Backend id from the config")->required();
    embed_cmd->add_option("--in", embed_in, "Corpus JSONL ({id, text})")->required();
    embed_cmd->add_option("--out", embed_out, "Cache file to write")->required();

    // mine-hn
    auto* mine_cmd = app.add_subcommand("mine-hn", "Mine hard negatives for query/positive pairs");
    std::string mine_corpus, mine_pairs, mine_out, mine_config, mine_backend;
    int mine_n = 7, mine_skip = 0;
    size_t mine_dim = 64;
    uint64_t mine_seed = 42;
    mine_cmd->add_option("--corpus", mine_corpus, "Corpus JSONL")->required();
    mine_cmd->add_option("--pairs", mine_pairs, "Pairs JSONL ({query, positive: doc id})")
        ->required();
    mine_cmd->add_option("--n", mine_n, "Negatives per query")->required();
    mine_cmd->add_option("--skip-top", mine_skip, "Skip this many top-ranked candidates");
    mine_cmd->add_option("--out", mine_out, "Output JSONL (stdout when omitted)");
    mine_cmd->add_option("--config", mine_config, "Run config JSON defining backends");
    mine_cmd->add_option("--backend", mine_backend, "Backend id from the config");
    mine_cmd->add_option("--dim", mine_dim, "Hash embedder dim (no config)");
    mine_cmd->add_option("--seed", mine_seed, "Hash embedder seed (no config)");

    // dedupe
    auto* dedupe_cmd = app.add_subcommand("dedupe", "Near-duplicate report over a corpus");
    std::string dd_in, dd_out;
    double dd_threshold = 0.8;
    size_t dd_ngram = 3, dd_dim = 64;
    uint64_t dd_seed = 42;
    bool dd_semantic = false;
    dedupe_cmd->add_option("--in", dd_in, "Corpus JSONL")->required();
    dedupe_cmd->add_option("--threshold", dd_threshold, "Jaccard (or cosine) threshold");
    dedupe_cmd->add_option("--ngram", dd_ngram, "Shingle size in tokens");
    dedupe_cmd->add_flag("--semantic", dd_semantic, "Cosine over hash embeddings instead");
    dedupe_cmd->add_option("--dim", dd_dim, "Hash embedder dim (semantic mode)");
    dedupe_cmd->add_option("--seed", dd_seed, "Hash embedder seed (semantic mode)");
    dedupe_cmd->add_option("--out", dd_out, "Report path (stdout when omitted)");

    // synthgen
    auto* synth_cmd = app.add_subcommand("synthgen", "Generate synthetic records or eval queries");
    std::string sg_task, sg_endpoint, sg_model, sg_adapter = "generic", sg_key_env;
    std::string sg_journal = "synthgen_journal.jsonl", sg_out, sg_queries_from;
    std::string sg_out_queries = "queries.jsonl", sg_out_qrels = "qrels.tsv";
    int sg_count = 0, sg_styles = 5;
    double sg_temperature = 0.7, sg_filter = 0.8;
    synth_cmd->add_option("--task", sg_task, "Task description for triple generation");
    synth_cmd->add_option("--count", sg_count, "Number of records to generate");
    synth_cmd->add_option("--endpoint", sg_endpoint, "Chat completion endpoint")->required();
    synth_cmd->add_option("--model", sg_model, "Generation model name")->required();
    synth_cmd->add_option("--adapter", sg_adapter, "Wire adapter: generic | openai");
    synth_cmd->add_option("--api-key-env", sg_key_env, "Env var holding the bearer token");
    synth_cmd->add_option("--journal", sg_journal, "Progress journal (resume point)");
    synth_cmd->add_option("--out", sg_out, "Filtered triples JSONL (stdout when omitted)");
    synth_cmd->add_option("--temperature", sg_temperature, "Sampling temperature");
    synth_cmd->add_option("--filter-threshold", sg_filter, "Jaccard dedupe threshold");
    synth_cmd->add_option("--queries-from", sg_queries_from,
                          "Chunks JSONL; emit eval queries + qrels instead of triples");
    synth_cmd->add_option("--styles", sg_styles, "Query styles per chunk");
    synth_cmd->add_option("--out-queries", sg_out_queries, "Queries JSONL (query mode)");
    synth_cmd->add_option("--out-qrels", sg_out_qrels, "Qrels TSV (query mode)");

    // chunk
    auto* chunk_cmd = app.add_subcommand("chunk", "Split a corpus into token-budgeted chunks");
    std::string ck_in, ck_out;
    uint64_t ck_budget = 1024;
    chunk_cmd->add_option("--in", ck_in, "Corpus JSONL")->required();
    chunk_cmd->add_option("--out", ck_out, "Chunks JSONL (stdout when omitted)");
    chunk_cmd->add_option("--max-tokens", ck_budget, "Token budget per chunk");

    // report
    auto* report_cmd = app.add_subcommand("report", "Render a report from a run directory");
    std::string rp_run, rp_format = "md", rp_out;
    report_cmd->add_option("--run", rp_run, "Run directory (holds results/)")->required();
    report_cmd->add_option("--format", rp_format, "md | json")->required();
    report_cmd->add_option("--out", rp_out, "Output path (stdout when omitted)");

    // make-fixtures
    auto* fx_cmd = app.add_subcommand("make-fixtures", "Write the bundled fixture suite");
    std::string fx_out;
    uint64_t fx_seed = 42;
    fx_cmd->add_option("--out", fx_out, "Target directory")->required();
    fx_cmd->add_option("--seed", fx_seed, "Fixture / embedder seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eval_cmd) {
            embench::RunConfig config;
            try {
                config = embench::load_run_config(eval_config);
            } catch (const embench::Error& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return kExitConfigError;
            }
            auto outcome = embench::run_benchmark(config);
            std::cout << embench::render_report(outcome.report, "markdown");
            if (outcome.failed_datasets > 0) {
                std::cerr << outcome.failed_datasets << " dataset(s) failed\n";
                return kExitPartialFailure;
            }
            return kExitOk;
        }

        if (*embed_cmd) {
            auto spec = select_backend(embed_config, embed_backend, 64, 42);
            spec.cache_path = embed_out;
            embench::Embedder embedder(spec);
            auto corpus = embench::load_corpus_jsonl(embed_in);
            std::vector<std::string> texts;
            for (const auto& e : corpus) texts.push_back(e.text);
            embedder.embed_texts(texts, std::nullopt);
            std::cerr << "embedded " << texts.size() << " texts into " << embed_out << "\n";
            return kExitOk;
        }

        if (*mine_cmd) {
            auto spec = select_backend(mine_config, mine_backend, mine_dim, mine_seed);
            embench::Embedder embedder(spec);
            auto corpus_entries = embench::load_corpus_jsonl(mine_corpus);
            std::vector<std::string> texts;
            for (const auto& e : corpus_entries) texts.push_back(e.text);
            auto vecs = embedder.embed_texts(texts, std::nullopt);
            embench::Corpus corpus;
            for (size_t i = 0; i < corpus_entries.size(); ++i)
                corpus.emplace_back(corpus_entries[i].id, std::move(vecs[i]));

            std::string out;
            for (const auto& line : embench::read_lines(mine_pairs)) {
                if (line.empty()) continue;
                json pair = json::parse(line);
                std::string query = pair.at("query").get<std::string>();
                std::string positive_id = pair.at("positive").get<std::string>();
                auto qvec = embedder.embed_texts({query}, std::nullopt).front();
                auto mined = embench::mine_hard_negatives(
                    query, qvec, positive_id, corpus, texts, static_cast<size_t>(mine_n),
                    static_cast<size_t>(mine_skip));
                json rec;
                rec["query"] = mined.query;
                rec["positive"] = mined.positive;
                rec["negatives"] = mined.negatives;
                out += rec.dump() + "\n";
            }
            write_or_print(mine_out, out);
            return kExitOk;
        }

        if (*dedupe_cmd) {
            auto entries = embench::load_corpus_jsonl(dd_in);
            std::vector<std::pair<std::string, std::string>> docs;
            for (const auto& e : entries) docs.emplace_back(e.id, e.text);
            embench::DedupeReport report =
                dd_semantic
                    ? embench::dedupe_corpus_semantic(
                          docs,
                          [&](const std::string& text) {
                              return embench::hash_embed(text, dd_dim, dd_seed);
                          },
                          dd_threshold)
                    : embench::dedupe_corpus(docs, dd_threshold, dd_ngram);
            json doc;
            doc["input"] = docs.size();
            doc["kept"] = report.kept.size();
            doc["clusters"] = report.clusters;
            write_or_print(dd_out, doc.dump(2) + "\n");
            return kExitOk;
        }

        if (*synth_cmd) {
            embench::ChatSpec chat_spec;
            chat_spec.endpoint = sg_endpoint;
            chat_spec.model = sg_model;
            chat_spec.adapter = sg_adapter;
            if (!sg_key_env.empty()) chat_spec.api_key_env = sg_key_env;
            auto chat = embench::make_http_chat_backend(chat_spec);

            if (!sg_queries_from.empty()) {
                std::string queries_out, qrels_out;
                size_t qid = 0;
                for (const auto& line : embench::read_lines(sg_queries_from)) {
                    if (line.empty()) continue;
                    json cj = json::parse(line);
                    embench::Chunk chunk;
                    chunk.source_id = cj.at("source_id").get<std::string>();
                    chunk.index = cj.value("index", size_t{0});
                    chunk.text = cj.at("text").get<std::string>();
                    auto result = embench::generate_eval_queries(
                        *chat, chunk, static_cast<size_t>(sg_styles), {}, 3, sg_temperature);
                    if (result.short_list)
                        std::cerr << "warning: short query list for chunk " << chunk.source_id
                                  << "#" << chunk.index << "\n";
                    for (const auto& [query, chunk_id] : result.queries) {
                        std::string id = "gq" + std::to_string(qid++);
                        json q;
                        q["id"] = id;
                        q["text"] = query;
                        queries_out += q.dump() + "\n";
                        qrels_out += id + "\t" + chunk_id + "\t1\n";
                    }
                }
                write_or_print(sg_out_queries, queries_out);
                write_or_print(sg_out_qrels, qrels_out);
                return kExitOk;
            }

            if (sg_task.empty() || sg_count <= 0)
                throw embench::ConfigError("synthgen needs --task and --count > 0");
            auto records = embench::generate_records(*chat, sg_task, static_cast<size_t>(sg_count),
                                                     sg_journal, sg_temperature);
            auto kept = embench::filter_records(records, sg_filter);
            std::string out;
            for (const auto& rec : kept) {
                json doc;
                doc["task"] = rec.task_description;
                doc["query"] = rec.user_query;
                doc["positive"] = rec.positive;
                doc["negatives"] = {rec.hard_negative};
                out += doc.dump() + "\n";
            }
            write_or_print(sg_out, out);
            std::cerr << "kept " << kept.size() << " of " << records.size() << " records\n";
            return kExitOk;
        }

        if (*chunk_cmd) {
            std::string out;
            for (const auto& entry : embench::load_corpus_jsonl(ck_in)) {
                for (const auto& chunk : embench::chunk_corpus(entry.id, entry.text, ck_budget)) {
                    json doc;
                    doc["source_id"] = chunk.source_id;
                    doc["index"] = chunk.index;
                    doc["text"] = chunk.text;
                    doc["token_estimate"] = chunk.token_estimate;
                    out += doc.dump() + "\n";
                }
            }
            write_or_print(ck_out, out);
            return kExitOk;
        }

        if (*report_cmd) {
            auto report = embench::report_from_run_dir(rp_run);
            write_or_print(rp_out, embench::render_report(report, rp_format));
            return kExitOk;
        }

        if (*fx_cmd) {
            std::string config = embench::write_fixture_suite(fx_out, fx_seed);
            std::cout << "fixture suite written; run config: " << config << "\n";
            return kExitOk;
        }
    } catch (const embench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
