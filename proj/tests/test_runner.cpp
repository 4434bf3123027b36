#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "embench/fixtures.hpp"
#include "embench/loaders.hpp"
#include "embench/runner.hpp"

namespace fs = std::filesystem;
using namespace embench;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("embench_runner_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

EvalResult score(TaskKind task, const std::string& id, double value) {
    EvalResult r;
    r.dataset_id = id;
    r.task = task;
    r.main_score = {default_metric(task), value};
    return r;
}

} // namespace

TEST_CASE("two-level aggregation reproduces the published row means") {
    // seven per-task scores -> overall 57.33 after render rounding
    std::vector<EvalResult> row = {
        score(TaskKind::Retrieval, "rtr", 0.5842),
        score(TaskKind::STS, "sts", 0.5934),
        score(TaskKind::PairClassification, "pc", 0.7493),
        score(TaskKind::Classification, "clf", 0.5734),
        score(TaskKind::Reranking, "rrk", 0.6843),
        score(TaskKind::Clustering, "clr", 0.4043),
        score(TaskKind::BitextMining, "btm", 0.4245),
    };
    auto agg = aggregate(row);
    CHECK(render_round(agg.overall) == doctest::Approx(57.33));

    std::vector<EvalResult> domain = {
        score(TaskKind::Retrieval, "news", 0.9042),
        score(TaskKind::Retrieval, "legal", 0.8996),
        score(TaskKind::Retrieval, "medical", 0.8164),
        score(TaskKind::Retrieval, "finance", 0.5734),
        score(TaskKind::Retrieval, "wiki", 0.9310),
    };
    auto dagg = aggregate(domain);
    CHECK(render_round(dagg.overall) == doctest::Approx(82.49));
    CHECK(dagg.per_task.at("RTR") == doctest::Approx(0.82492).epsilon(1e-12));
}

TEST_CASE("aggregate: per-task means then unweighted mean of tasks") {
    std::vector<EvalResult> results = {
        score(TaskKind::Retrieval, "a", 0.4),
        score(TaskKind::Retrieval, "b", 0.6),
        score(TaskKind::STS, "c", 1.0),
    };
    auto agg = aggregate(results);
    CHECK(agg.per_task.at("RTR") == doctest::Approx(0.5));
    CHECK(agg.per_task.at("STS") == doctest::Approx(1.0));
    CHECK(agg.overall == doctest::Approx(0.75));

    auto single = aggregate({score(TaskKind::STS, "only", 0.42)});
    CHECK(single.overall == doctest::Approx(0.42));
}

TEST_CASE("aggregate ignores dataset and task enumeration order") {
    std::vector<EvalResult> results = {
        score(TaskKind::Retrieval, "a", 0.3), score(TaskKind::STS, "b", 0.9),
        score(TaskKind::Clustering, "c", 0.5), score(TaskKind::Retrieval, "d", 0.7),
    };
    auto base = aggregate(results);
    std::reverse(results.begin(), results.end());
    auto rev = aggregate(results);
    CHECK(base.overall == rev.overall);
    CHECK(base.per_task == rev.per_task);
}

TEST_CASE("render rounding is half away from zero at two decimals") {
    CHECK(render_round(0.57334285) == doctest::Approx(57.33));
    CHECK(render_round(0.82492) == doctest::Approx(82.49));
    CHECK(render_round(0.005) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(render_round(0.0005) == doctest::Approx(0.05));
    CHECK(render_round(-0.12345) == doctest::Approx(-12.35));  // half away from zero
    CHECK(render_round(1.0) == doctest::Approx(100.0));
}

TEST_CASE("instruction resolution precedence") {
    DatasetManifest m;
    m.id = "ds1";
    m.task = TaskKind::Retrieval;
    m.language = "ar";
    CHECK(resolve_instruction(m, {}) == default_instruction(TaskKind::Retrieval));

    m.instruction = "custom {query}";
    CHECK(resolve_instruction(m, {}) == "custom {query}");

    std::map<std::string, std::string> overrides = {{"task:retrieval", "task override"}};
    CHECK(resolve_instruction(m, overrides) == "task override");
    overrides["ds1"] = "dataset override";
    CHECK(resolve_instruction(m, overrides) == "dataset override");

    // monolingual reranking substitutes {Lang} with the dataset language
    DatasetManifest rrk;
    rrk.id = "rrk";
    rrk.task = TaskKind::Reranking;
    rrk.language = "ar";
    auto instr = resolve_instruction(rrk, {});
    REQUIRE(instr.has_value());
    CHECK(instr->find("in ar") != std::string::npos);
    CHECK(instr->find("{Lang}") == std::string::npos);
}

TEST_CASE("full fixture run aggregates, renders and resumes") {
    TempDir dir;
    auto config_path = write_fixture_suite(dir.path.string(), 42);
    auto config = load_run_config(config_path);
    auto outcome = run_benchmark(config);
    CHECK(outcome.failed_datasets == 0);
    CHECK(outcome.report.per_dataset.size() == 8);
    CHECK(outcome.report.per_task.at("hash64").size() == 8);
    CHECK(outcome.report.overall.count("hash64") == 1);

    fs::path report_json = fs::path(config.output_dir) / "report.json";
    fs::path report_md = fs::path(config.output_dir) / "report.md";
    REQUIRE(fs::exists(report_json));
    REQUIRE(fs::exists(report_md));
    std::string first_bytes = slurp(report_json);

    // resume: delete the report, keep per-dataset results; rerun regenerates
    // byte-identical output with zero evaluations
    fs::remove(report_json);
    fs::remove(report_md);
    auto resumed = run_benchmark(config);
    CHECK(resumed.failed_datasets == 0);
    CHECK(slurp(report_json) == first_bytes);

    // report round trip: structurally equal
    auto loaded = load_report_json(slurp(report_json));
    CHECK(loaded.per_dataset.size() == outcome.report.per_dataset.size());
    CHECK(loaded.overall.at("hash64") ==
          doctest::Approx(outcome.report.overall.at("hash64")).epsilon(1e-15));
    std::string re_rendered = render_report(loaded, "json");
    CHECK(re_rendered == first_bytes);

    // report subcommand path: rebuild from the run dir alone
    auto rebuilt = report_from_run_dir(config.output_dir);
    CHECK(render_report(rebuilt, "json") == first_bytes);
}

TEST_CASE("markdown leaderboard sorts backends by overall descending") {
    BenchmarkReport report;
    for (auto [name, value] : {std::pair<std::string, double>{"weak", 0.3},
                               {"strong", 0.9}}) {
        DatasetEntry e;
        e.backend = name;
        e.dataset_id = "d";
        e.task_label = "RTR";
        e.metric = "ndcg@10";
        e.main_score = {"ndcg@10", value};
        report.per_dataset.push_back(e);
        report.per_task[name]["RTR"] = value;
        report.overall[name] = value;
        report.cost_latency[name] = {};
    }
    auto md = render_report(report, "markdown");
    CHECK(md.find("strong") < md.find("weak"));
    CHECK(md.find("90.00") != std::string::npos);
    CHECK_THROWS_AS(render_report(report, "pdf"), UnknownFormat);
}

TEST_CASE("failing dataset produces an error entry and nonzero failure count") {
    TempDir dir;
    auto config_path = write_fixture_suite(dir.path.string(), 42);
    auto config = load_run_config(config_path);
    // break one manifest: point it at a missing file
    fs::path bad = dir.path / "manifests" / "fx-retrieval.json";
    std::ofstream(bad) << R"({"id":"fx-retrieval","task":"retrieval","language":"ar",
        "paths":{"corpus":"missing.jsonl","queries":"missing.jsonl","qrels":"missing.tsv"}})";
    config.output_dir = (dir.path / "run2").string();
    auto outcome = run_benchmark(config);
    CHECK(outcome.failed_datasets == 1);
    CHECK(outcome.report.failures.size() == 1);
    CHECK(outcome.report.per_dataset.size() == 7);
    auto md = render_report(outcome.report, "markdown");
    CHECK(md.find("failed") != std::string::npos);
}

TEST_CASE("unreachable backend with no cache fails every dataset") {
    TempDir dir;
    auto config_path = write_fixture_suite(dir.path.string(), 42);
    auto config = load_run_config(config_path);
    config.backends[0].kind = "remote";
    config.backends[0].endpoint = "http://127.0.0.1:9/unreachable";
    config.backends[0].retry.max_attempts = 1;
    auto outcome = run_benchmark(config);
    CHECK(outcome.failed_datasets == 8);
    CHECK(outcome.report.failures.size() == 8);
    CHECK(outcome.report.per_dataset.empty());
    for (const auto& f : outcome.report.failures) CHECK(f.error.has_value());
}

TEST_CASE("full recompute reproduces the report byte for byte") {
    TempDir dir;
    auto config_path = write_fixture_suite(dir.path.string(), 42);
    auto config = load_run_config(config_path);
    run_benchmark(config);
    fs::path report_path = fs::path(config.output_dir) / "report.json";
    std::string first = slurp(report_path);

    fs::remove_all(fs::path(config.output_dir));
    run_benchmark(config);
    CHECK(slurp(report_path) == first);
}

TEST_CASE("metric override promotes a computed auxiliary to the headline") {
    TempDir dir;
    auto manifest_path = write_fixture(TaskKind::STS, dir.path.string(), 42);
    auto manifest = load_manifest(manifest_path);
    auto data = load_task_data(manifest);

    BackendSpec spec;
    spec.id = "hash64";
    spec.kind = "hash";
    spec.model_name = "hash-embedder-64";
    spec.dim = 64;
    Embedder backend(spec);

    manifest.metric = "pearson";
    manifest.metric_override = true;
    auto result = evaluate_dataset(manifest, data, backend,
                                   resolve_instruction(manifest, {}), {});
    CHECK(result.main_score.name == "pearson");
    CHECK(result.auxiliary.count("spearman") == 1);

    manifest.metric = "made_up_metric";
    Embedder backend2(spec);
    CHECK_THROWS_AS(
        evaluate_dataset(manifest, data, backend2, resolve_instruction(manifest, {}), {}),
        ValidationError);
}

TEST_CASE("remote backend runs fixtures through the wire, then offline from cache") {
    // An HTTP twin of the hash backend: the runner sees a real remote
    // service on the first pass and a complete cache afterwards.
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/embed", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        auto body = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["embeddings"] = nlohmann::json::array();
        for (const auto& text : body.at("input"))
            out["embeddings"].push_back(hash_embed(text.get<std::string>(), 64, 42).values);
        res.set_content(out.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    auto thread = std::thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    TempDir dir;
    std::vector<std::string> manifests = {
        write_fixture(TaskKind::Retrieval, dir.path.string(), 42),
        write_fixture(TaskKind::STS, dir.path.string(), 42),
    };
    RunConfig config;
    BackendSpec spec;
    spec.id = "remote64";
    spec.kind = "remote";
    spec.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/embed";
    spec.model_name = "remote-hash";
    spec.dim = 64;
    spec.max_batch = 8;
    spec.cache_path = (dir.path / "cache.embc").string();
    spec.retry.max_attempts = 1;
    config.backends = {spec};
    config.manifests = manifests;
    config.output_dir = (dir.path / "run_live").string();

    auto live = run_benchmark(config);
    CHECK(live.failed_datasets == 0);
    CHECK(hits.load() > 0);
    CHECK(live.report.cost_latency.at("remote64").requests > 0);
    CHECK(live.report.overall.at("remote64") == doctest::Approx(1.0).epsilon(1e-9));

    server.stop();
    thread.join();

    // Same cache, dead endpoint, fresh output dir: the run must complete
    // purely from the cache with identical scores and zero requests.
    config.output_dir = (dir.path / "run_offline").string();
    auto offline = run_benchmark(config);
    CHECK(offline.failed_datasets == 0);
    CHECK(offline.report.cost_latency.at("remote64").requests == 0);
    CHECK(offline.report.overall.at("remote64") ==
          doctest::Approx(live.report.overall.at("remote64")).epsilon(1e-15));
    for (size_t i = 0; i < live.report.per_dataset.size(); ++i)
        CHECK(offline.report.per_dataset[i].main_score.value ==
              live.report.per_dataset[i].main_score.value);  // bitwise
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_run_config("{", ""), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"backends":[],"manifests":["m"],"output_dir":"o"})", ""),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(
            R"({"backends":[{"id":"h","kind":"hash","model_name":"m","dim":8}],)"
            R"("manifests":[],"output_dir":"o"})",
            ""),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(
            R"({"backends":[{"id":"h","kind":"hash","model_name":"m","dim":8}],)"
            R"("manifests":["m"],"output_dir":"o","report_formats":["pdf"]})",
            ""),
        ConfigError);
}

TEST_CASE("glob expansion is sorted and literal paths pass through") {
    TempDir dir;
    std::ofstream(dir.path / "b.json") << "{}";
    std::ofstream(dir.path / "a.json") << "{}";
    std::ofstream(dir.path / "c.txt") << "x";
    auto matched = expand_manifest_globs({(dir.path / "*.json").string()});
    REQUIRE(matched.size() == 2);
    CHECK(fs::path(matched[0]).filename() == "a.json");
    CHECK(fs::path(matched[1]).filename() == "b.json");
    auto literal = expand_manifest_globs({"/does/not/exist.json"});
    CHECK(literal == std::vector<std::string>{"/does/not/exist.json"});
}
