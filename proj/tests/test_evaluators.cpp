#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "embench/evaluators.hpp"
#include "embench/fixtures.hpp"
#include "embench/probe.hpp"
#include "embench/rng.hpp"

using namespace embench;

namespace {

// Embedder over a text -> vector map; unmapped texts fall back to the hash
// embedder so instruction-carrying payloads stay legal.
Embedder scripted_embedder(std::map<std::string, std::vector<float>> table, size_t dim) {
    class MapTransport final : public Transport {
    public:
        MapTransport(std::map<std::string, std::vector<float>> table, size_t dim)
            : table_(std::move(table)), dim_(dim) {}
        std::vector<std::vector<float>> embed_batch(
            const std::vector<std::string>& payloads) override {
            std::vector<std::vector<float>> rows;
            for (const auto& p : payloads) {
                auto it = table_.find(p);
                rows.push_back(it != table_.end() ? it->second
                                                  : hash_embed(p, dim_, 7).values);
            }
            return rows;
        }
        bool metered() const override { return false; }

    private:
        std::map<std::string, std::vector<float>> table_;
        size_t dim_;
    };
    BackendSpec spec;
    spec.id = "scripted";
    spec.kind = "hash";  // local
    spec.model_name = "scripted";
    spec.dim = dim;
    return Embedder(spec, std::make_unique<MapTransport>(std::move(table), dim));
}

Embedder hash_embedder(size_t dim = 64, uint64_t seed = 42, size_t max_batch = 8) {
    BackendSpec spec;
    spec.id = "hash";
    spec.kind = "hash";
    spec.model_name = "hash-test";
    spec.dim = dim;
    spec.seed = seed;
    spec.max_batch = max_batch;
    return Embedder(spec);
}

RetrievalData self_retrieval_data() {
    RetrievalData data;
    for (int i = 0; i < 4; ++i) {
        std::string text = "unique tokens for doc " + std::to_string(i) + " body" +
                           std::to_string(i);
        data.documents.emplace_back("d" + std::to_string(i), text);
    }
    for (int i = 0; i < 3; ++i) {
        data.queries.emplace_back("q" + std::to_string(i), data.documents[i].second);
        data.qrels.entries[{"q" + std::to_string(i), "d" + std::to_string(i)}] = 1;
    }
    return data;
}

} // namespace

TEST_CASE("retrieval: verbatim copies of relevant docs score 1.0") {
    auto backend = hash_embedder();
    auto result = eval_retrieval(self_retrieval_data(), backend, std::nullopt);
    CHECK(result.main_score.name == "ndcg@10");
    CHECK(result.main_score.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.auxiliary.at("recall@10") == doctest::Approx(1.0));
    CHECK(result.auxiliary.at("mrr@10") == doctest::Approx(1.0));
    CHECK(result.auxiliary.at("skipped_queries") == 0.0);
}

TEST_CASE("retrieval: relevant doc ranked second gives 1/log2(3)") {
    std::map<std::string, std::vector<float>> table = {
        {"the query", {1, 0}},
        {"top doc", {1, 0}},
        {"relevant doc", {0.9f, 0.435889894f}},
        {"far doc", {0, 1}},
    };
    RetrievalData data;
    data.documents = {{"d1", "relevant doc"}, {"d2", "top doc"}, {"d3", "far doc"}};
    data.queries = {{"q1", "the query"}};
    data.qrels.entries[{"q1", "d1"}] = 1;
    auto backend = scripted_embedder(table, 2);
    auto result = eval_retrieval(data, backend, std::nullopt);
    CHECK(result.main_score.value == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-9));
    CHECK(result.auxiliary.at("mrr@10") == doctest::Approx(0.5));
}

TEST_CASE("retrieval: empty corpus raises EmptyDataset") {
    RetrievalData data;
    data.queries = {{"q1", "text"}};
    auto backend = hash_embedder();
    CHECK_THROWS_AS(eval_retrieval(data, backend, std::nullopt), EmptyDataset);
}

TEST_CASE("retrieval: queries without positives are skipped, not scored") {
    auto data = self_retrieval_data();
    data.queries.emplace_back("q_extra", "entirely novel tokens here");
    auto backend = hash_embedder();
    auto result = eval_retrieval(data, backend, std::nullopt);
    CHECK(result.main_score.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.auxiliary.at("skipped_queries") == 1.0);
}

TEST_CASE("crosslingual retrieval on a same-language dataset reduces to retrieval") {
    auto data = self_retrieval_data();
    auto b1 = hash_embedder();
    auto b2 = hash_embedder();
    auto plain = eval_retrieval(data, b1, std::nullopt);
    auto cross = eval_crosslingual_retrieval(data, b2, std::nullopt);
    CHECK(plain.main_score.value == cross.main_score.value);  // bitwise
    CHECK(cross.task == TaskKind::CrosslingualRetrieval);
}

TEST_CASE("retrieval documents are embedded raw even with an instruction") {
    auto data = self_retrieval_data();
    auto b1 = hash_embedder();
    auto instruction = std::string("Q: {query}");
    auto result = eval_retrieval(data, b1, instruction);
    // instruction only touches queries; self-retrieval keeps working because
    // the query tokens dominate the overlap
    CHECK(result.main_score.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reranking: map of a (pos, neg, pos) item is 0.83333") {
    std::map<std::string, std::vector<float>> table = {
        {"the query", {1, 0}},
        {"first positive", {1, 0}},
        {"the negative", {0.8f, 0.6f}},
        {"second positive", {0.6f, 0.8f}},
    };
    RerankingData data;
    data.items.push_back({"the query", {"first positive", "second positive"}, {"the negative"}});
    auto backend = scripted_embedder(table, 2);
    auto result = eval_reranking(data, backend, std::nullopt);
    CHECK(result.main_score.name == "map");
    CHECK(result.main_score.value == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("reranking: positives identical to the query give MAP 1.0") {
    RerankingData data;
    for (int i = 0; i < 3; ++i) {
        std::string q = "query tokens number " + std::to_string(i);
        data.items.push_back({q, {q}, {"noise alpha " + std::to_string(i),
                                       "noise beta " + std::to_string(i)}});
    }
    auto backend = hash_embedder();
    auto result = eval_reranking(data, backend, std::nullopt);
    CHECK(result.main_score.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reranking: item without a positive raises") {
    RerankingData data;
    data.items.push_back({"q", {}, {"neg"}});
    auto backend = hash_embedder();
    CHECK_THROWS_AS(eval_reranking(data, backend, std::nullopt), ItemWithoutPositive);
}

TEST_CASE("sts: gold aligned, reversed, and tied against cosine order") {
    StsData aligned;
    aligned.pairs = {{"alpha beta gamma", "zeta eta theta", 0.0},
                     {"alpha beta gamma", "alpha beta zeta", 2.0},
                     {"alpha beta gamma", "alpha beta gamma", 4.0}};
    auto b1 = hash_embedder();
    CHECK(eval_sts(aligned, b1, std::nullopt).main_score.value ==
          doctest::Approx(1.0).epsilon(1e-9));

    StsData reversed = aligned;
    reversed.pairs[0].gold_score = 4.0;
    reversed.pairs[2].gold_score = 0.0;
    reversed.pairs[1].gold_score = 2.0;
    auto b2 = hash_embedder();
    CHECK(eval_sts(reversed, b2, std::nullopt).main_score.value ==
          doctest::Approx(-1.0).epsilon(1e-9));

    // tied gold, tied cosine: ranks (1, 2.5, 2.5) on both sides. The repeated
    // pair guarantees a bitwise cosine tie.
    StsData tied;
    tied.pairs = {{"left words", "right words", 1.0},
                  {"same text one", "same text one", 2.0},
                  {"same text one", "same text one", 2.0}};
    auto b3 = hash_embedder();
    CHECK(eval_sts(tied, b3, std::nullopt).main_score.value ==
          doctest::Approx(1.0).epsilon(1e-9));

    StsData constant;
    constant.pairs = {{"a b", "c d", 1.0}, {"e f", "g h", 1.0}};
    auto b4 = hash_embedder();
    CHECK_THROWS_AS(eval_sts(constant, b4, std::nullopt), DegenerateInput);
}

TEST_CASE("linear probe separates two clusters and starts uniform") {
    std::vector<std::pair<EmbeddingVector, std::string>> train;
    for (int i = 0; i < 8; ++i) {
        float jitter = 0.05f * static_cast<float>(i % 4);
        train.emplace_back(EmbeddingVector::of({1.0f, jitter}), "left");
        train.emplace_back(EmbeddingVector::of({-1.0f, -jitter}), "right");
    }
    auto model = train_linear_classifier(train);
    for (const auto& [x, label] : train) CHECK(model.predict(x) == label);

    ProbeConfig zero;
    zero.epochs = 0;
    auto untrained = train_linear_classifier(train, zero);
    auto proba = untrained.predict_proba(train[0].first);
    CHECK(proba[0] == doctest::Approx(0.5));
    CHECK(proba[1] == doctest::Approx(0.5));

    std::vector<std::pair<EmbeddingVector, std::string>> one_class = {
        {EmbeddingVector::of({1.0f, 0.0f}), "only"}};
    CHECK_THROWS_AS(train_linear_classifier(one_class), SingleClass);
}

TEST_CASE("classification: separable fixture reaches accuracy and AP 1.0") {
    ClassificationData data;
    for (int i = 0; i < 6; ++i) {
        data.train.emplace_back("alpha tokens group one item" + std::to_string(i), "a");
        data.train.emplace_back("beta words bunch two item" + std::to_string(i), "b");
    }
    data.test = data.train;
    auto backend = hash_embedder();
    auto result = eval_classification(data, backend, std::nullopt);
    CHECK(result.main_score.name == "ap");
    CHECK(result.main_score.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(result.auxiliary.at("accuracy") == doctest::Approx(1.0));
    CHECK(result.auxiliary.at("macro_f1") == doctest::Approx(1.0));
}

TEST_CASE("classification: random labels on noise embeddings sit at chance") {
    double total = 0.0;
    int sweeps = 5;
    for (int seed = 0; seed < sweeps; ++seed) {
        Rng rng(900 + seed);
        ClassificationData data;
        auto noise_text = [&](const std::string& tag, int i) {
            std::string text = tag + std::to_string(i);
            for (int w = 0; w < 6; ++w)
                text += " n" + std::to_string(rng.next() % 100000);
            return text;
        };
        for (int i = 0; i < 20; ++i)
            data.train.emplace_back(noise_text("tr", i), i % 2 == 0 ? "a" : "b");
        for (int i = 0; i < 20; ++i)
            data.test.emplace_back(noise_text("te", i), rng.bounded(2) == 0 ? "a" : "b");
        auto backend = hash_embedder(64, 1000 + static_cast<uint64_t>(seed));
        auto result = eval_classification(data, backend, std::nullopt);
        total += result.auxiliary.at("accuracy");
    }
    double mean = total / sweeps;
    CHECK(mean > 0.35);
    CHECK(mean < 0.65);
}

TEST_CASE("classification substitutes {options} with the label set") {
    class CapturingTransport final : public Transport {
    public:
        std::vector<std::string>* sink;
        std::mutex mu;
        explicit CapturingTransport(std::vector<std::string>* s) : sink(s) {}
        std::vector<std::vector<float>> embed_batch(
            const std::vector<std::string>& payloads) override {
            std::vector<std::vector<float>> rows;
            std::lock_guard lock(mu);
            for (const auto& p : payloads) {
                sink->push_back(p);
                rows.push_back(hash_embed(p, 16, 3).values);
            }
            return rows;
        }
        bool metered() const override { return false; }
    };
    std::vector<std::string> payloads;
    BackendSpec spec;
    spec.id = "cap";
    spec.kind = "hash";
    spec.model_name = "cap";
    spec.dim = 16;
    Embedder backend(spec, std::make_unique<CapturingTransport>(&payloads));

    ClassificationData data;
    data.train = {{"first sample text", "pos"}, {"second sample words", "neg"},
                  {"third sample body", "pos"}, {"fourth sample item", "neg"}};
    data.test = {{"probe text", "pos"}};
    eval_classification(data, backend, default_instruction(TaskKind::Classification));
    bool found = false;
    for (const auto& p : payloads)
        if (p.find("categories neg, pos") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("pair classification: clean duplicates score ap 1.0") {
    PairClassificationData data;
    for (int i = 0; i < 3; ++i) {
        std::string text = "duplicate pair body " + std::to_string(i);
        data.pairs.push_back({text, text, 1});
        data.pairs.push_back({"left side " + std::to_string(i),
                              "unrelated right " + std::to_string(i), 0});
    }
    auto backend = hash_embedder();
    auto result = eval_pair_classification(data, backend, std::nullopt);
    CHECK(result.main_score.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(result.auxiliary.at("best_accuracy") == doctest::Approx(1.0));
}

TEST_CASE("pair classification: metrics example via crafted cosines") {
    std::map<std::string, std::vector<float>> table = {
        {"l0", {1, 0}}, {"r0", {0.9f, 0.435889894f}},   // cos 0.9
        {"l1", {1, 0}}, {"r1", {0.8f, 0.6f}},           // cos 0.8
        {"l2", {1, 0}}, {"r2", {0.3f, 0.953939201f}},   // cos 0.3
    };
    PairClassificationData data;
    data.pairs = {{"l0", "r0", 1}, {"l1", "r1", 0}, {"l2", "r2", 1}};
    auto backend = scripted_embedder(table, 2);
    auto result = eval_pair_classification(data, backend, std::nullopt);
    CHECK(result.main_score.value == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-6));

    PairClassificationData one_class;
    one_class.pairs = {{"a", "b", 1}, {"c", "d", 1}};
    auto b2 = hash_embedder();
    CHECK_THROWS_AS(eval_pair_classification(one_class, b2, std::nullopt), OneClassOnly);
}

TEST_CASE("clustering: two tight separated blobs reach v-measure 1.0") {
    ClusteringData data;
    for (int cls = 0; cls < 2; ++cls) {
        std::string core;
        for (int w = 0; w < 6; ++w)
            core += (w ? " " : "") + ("blob" + std::to_string(cls) + "w" + std::to_string(w));
        for (int i = 0; i < 7; ++i)
            data.items.emplace_back(core + " extra" + std::to_string(cls) + std::to_string(i),
                                    cls == 0 ? "news" : "sport");
    }
    auto backend = hash_embedder();
    auto result = eval_clustering(data, backend, std::nullopt, 42);
    CHECK(result.main_score.name == "v_measure");
    CHECK(result.main_score.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("clustering: all-identical points collapse to v-measure 0") {
    ClusteringData data;
    for (int i = 0; i < 6; ++i)
        data.items.emplace_back("identical text", i % 2 == 0 ? "a" : "b");
    auto backend = hash_embedder();
    auto result = eval_clustering(data, backend, std::nullopt, 42);
    CHECK(result.main_score.value == doctest::Approx(0.0));
}

TEST_CASE("clustering: a single gold class is degenerate with v 1.0") {
    ClusteringData data;
    for (int i = 0; i < 5; ++i)
        data.items.emplace_back("item body " + std::to_string(i), "only");
    auto backend = hash_embedder();
    auto result = eval_clustering(data, backend, std::nullopt, 42);
    CHECK(result.main_score.value == doctest::Approx(1.0));
    CHECK(result.auxiliary.at("degenerate_single_class") == 1.0);
}

TEST_CASE("bitext: identical targets score f1 1.0, wrong nearest gives 2/3") {
    BitextData data;
    for (int i = 0; i < 4; ++i) {
        std::string text = "sentence number " + std::to_string(i) + " tokens";
        data.pairs.emplace_back(text, text);
    }
    auto b1 = hash_embedder();
    auto perfect = eval_bitext(data, b1, std::nullopt);
    CHECK(perfect.main_score.name == "f1");
    CHECK(perfect.main_score.value == doctest::Approx(1.0).epsilon(1e-12));

    std::map<std::string, std::vector<float>> table = {
        {"s0", {1, 0}}, {"s1", {0, 1}}, {"s2", {0.9f, 0.435889894f}},
        {"t0", {1, 0}}, {"t1", {0, 1}}, {"t2", {0, -1}},
    };
    BitextData skew;
    skew.pairs = {{"s0", "t0"}, {"s1", "t1"}, {"s2", "t2"}};
    auto b2 = scripted_embedder(table, 2);
    auto partial = eval_bitext(skew, b2, std::nullopt);
    CHECK(partial.main_score.value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(partial.auxiliary.at("precision") == doctest::Approx(2.0 / 3.0));
    CHECK(partial.auxiliary.at("recall") == doctest::Approx(2.0 / 3.0));

    BitextData empty;
    auto b3 = hash_embedder();
    CHECK_THROWS_AS(eval_bitext(empty, b3, std::nullopt), EmptySide);
}

TEST_CASE("evaluators are deterministic across runs and concurrency") {
    auto data = self_retrieval_data();
    for (size_t conc : {1ul, 8ul}) {
        BackendSpec spec;
        spec.id = "hash";
        spec.kind = "hash";
        spec.model_name = "hash-test";
        spec.dim = 64;
        spec.seed = 42;
        spec.max_batch = 2;
        spec.max_concurrency = conc;
        Embedder b(spec);
        auto r1 = eval_retrieval(data, b, std::nullopt);
        Embedder b2(spec);
        auto r2 = eval_retrieval(data, b2, std::nullopt);
        CHECK(r1.main_score.value == r2.main_score.value);
    }
}

TEST_CASE("ranking scores are invariant to positive scaling of embeddings") {
    std::map<std::string, std::vector<float>> base = {
        {"q", {0.6f, 0.8f}}, {"a", {1, 0}}, {"b", {0, 1}}, {"c", {0.7f, 0.7f}},
    };
    std::map<std::string, std::vector<float>> scaled;
    for (auto [k, v] : base) {
        for (auto& x : v) x *= 37.5f;
        scaled[k] = v;
    }
    RetrievalData data;
    data.documents = {{"d1", "a"}, {"d2", "b"}, {"d3", "c"}};
    data.queries = {{"q1", "q"}};
    data.qrels.entries[{"q1", "d3"}] = 1;
    auto b1 = scripted_embedder(base, 2);
    auto b2 = scripted_embedder(scaled, 2);
    auto r1 = eval_retrieval(data, b1, std::nullopt);
    auto r2 = eval_retrieval(data, b2, std::nullopt);
    CHECK(r1.main_score.value == doctest::Approx(r2.main_score.value).epsilon(1e-12));
}
