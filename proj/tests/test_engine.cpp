#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "embench/engine.hpp"
#include "embench/rng.hpp"

using namespace embench;

namespace {

EmbeddingVector vec(std::vector<float> v) { return EmbeddingVector::of(std::move(v)); }

EmbeddingVector random_vec(Rng& rng, size_t dim) {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
    return vec(std::move(v));
}

} // namespace

TEST_CASE("cosine examples") {
    auto v1 = vec({3, 4});
    CHECK(cosine(v1, v1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cosine(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
    CHECK(cosine(vec({1, 1}), vec({1, 0})) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
    CHECK_THROWS_AS(cosine(vec({1, 0}), vec({1, 0, 0})), DimensionMismatch);
    CHECK_THROWS_AS(cosine(vec({0, 0}), vec({1, 0})), ZeroVector);
}

TEST_CASE("cosine is symmetric bitwise and scale invariant") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = random_vec(rng, 16);
        auto b = random_vec(rng, 16);
        CHECK(cosine(a, b) == cosine(b, a));

        // power-of-two scaling is exact in f32: bitwise identical cosine
        float pow2 = std::ldexp(1.0f, static_cast<int>(rng.bounded(7)) - 3);
        std::vector<float> scaled2 = a.values;
        for (auto& x : scaled2) x *= pow2;
        CHECK(cosine(vec(std::move(scaled2)), b) == cosine(a, b));

        // arbitrary scaling rounds each f32 component (~1e-7 relative)
        float alpha = static_cast<float>(rng.uniform(0.1, 5.0));
        std::vector<float> scaled = a.values;
        for (auto& x : scaled) x *= alpha;
        CHECK(cosine(vec(std::move(scaled)), b) == doctest::Approx(cosine(a, b)).epsilon(1e-6));
    }
}

TEST_CASE("top_k basics") {
    auto q = vec({1, 0});
    Corpus corpus{{"d1", vec({1, 0})}, {"d2", vec({0, 1})}};
    auto top = top_k(q, corpus, 1);
    REQUIRE(top.size() == 1);
    CHECK(top[0].doc_id == "d1");
    CHECK(top[0].score == doctest::Approx(1.0));

    // identical vectors tie-break by ascending id
    Corpus tied{{"dB", vec({1, 1})}, {"dA", vec({1, 1})}};
    auto both = top_k(vec({1, 1}), tied, 2);
    REQUIRE(both.size() == 2);
    CHECK(both[0].doc_id == "dA");
    CHECK(both[1].doc_id == "dB");

    // k larger than the corpus truncates
    Corpus three{{"a", vec({1, 0})}, {"b", vec({0, 1})}, {"c", vec({1, 1})}};
    CHECK(top_k(q, three, 10).size() == 3);
}

TEST_CASE("top_k over full corpus is a sorted permutation of pairwise cosines") {
    Rng rng(77);
    auto q = random_vec(rng, 24);
    Corpus corpus;
    for (int i = 0; i < 50; ++i)
        corpus.emplace_back("d" + std::to_string(i), random_vec(rng, 24));
    auto all = top_k(q, corpus, corpus.size());
    REQUIRE(all.size() == corpus.size());
    std::vector<double> direct;
    for (const auto& [id, v] : corpus) direct.push_back(cosine(q, v));
    std::sort(direct.begin(), direct.end(), std::greater<double>());
    for (size_t i = 0; i < all.size(); ++i)
        CHECK(all[i].score == doctest::Approx(direct[i]).epsilon(1e-12));
    for (size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].score >= all[i].score);
}

TEST_CASE("top_k_many matches serial reference bitwise") {
    Rng rng(13);
    Corpus corpus;
    for (int i = 0; i < 300; ++i)
        corpus.emplace_back("d" + std::to_string(i), random_vec(rng, 48));
    std::vector<EmbeddingVector> queries;
    for (int i = 0; i < 37; ++i) queries.push_back(random_vec(rng, 48));

    auto parallel = top_k_many(queries, corpus, 10);
    auto serial = top_k_many_serial(queries, corpus, 10);
    REQUIRE(parallel.size() == serial.size());
    for (size_t q = 0; q < parallel.size(); ++q) {
        REQUIRE(parallel[q].size() == serial[q].size());
        for (size_t i = 0; i < parallel[q].size(); ++i) {
            CHECK(parallel[q][i].doc_id == serial[q][i].doc_id);
            CHECK(parallel[q][i].score == serial[q][i].score);  // bitwise
        }
    }
}

TEST_CASE("top_k_many is stable across repeated calls") {
    Rng rng(17);
    Corpus corpus;
    for (int i = 0; i < 100; ++i)
        corpus.emplace_back("d" + std::to_string(i), random_vec(rng, 32));
    std::vector<EmbeddingVector> queries;
    for (int i = 0; i < 9; ++i) queries.push_back(random_vec(rng, 32));
    auto a = top_k_many(queries, corpus, 5);
    auto b = top_k_many(queries, corpus, 5);
    for (size_t q = 0; q < a.size(); ++q)
        for (size_t i = 0; i < a[q].size(); ++i) {
            CHECK(a[q][i].doc_id == b[q][i].doc_id);
            CHECK(a[q][i].score == b[q][i].score);
        }
}

TEST_CASE("similarity_matrix examples") {
    auto e1 = vec({1, 0});
    auto e2 = vec({0, 1});
    auto m = similarity_matrix({e1, e2}, {e1, e2});
    CHECK(m[0][0] == doctest::Approx(1.0));
    CHECK(m[0][1] == doctest::Approx(0.0));
    CHECK(m[1][0] == doctest::Approx(0.0));
    CHECK(m[1][1] == doctest::Approx(1.0));

    auto one = similarity_matrix({e1}, {e1});
    CHECK(one[0][0] == doctest::Approx(1.0));
}

TEST_CASE("similarity_matrix matches looped cosine bitwise") {
    Rng rng(5);
    std::vector<EmbeddingVector> rows, cols;
    for (int i = 0; i < 7; ++i) rows.push_back(random_vec(rng, 20));
    for (int i = 0; i < 11; ++i) cols.push_back(random_vec(rng, 20));
    auto m = similarity_matrix(rows, cols);
    auto s = similarity_matrix_serial(rows, cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) {
            CHECK(m[i][j] == cosine(rows[i], cols[j]));  // bitwise
            CHECK(m[i][j] == s[i][j]);
        }
}

TEST_CASE("engine rejects bad inputs") {
    Corpus corpus{{"d1", vec({1, 0})}};
    CHECK_THROWS_AS(top_k(vec({1, 0, 0}), corpus, 1), DimensionMismatch);
    CHECK_THROWS_AS(top_k(vec({1, 0}), Corpus{}, 1), EmptyDataset);
    Corpus with_zero{{"d1", vec({0, 0})}};
    CHECK_THROWS_AS(top_k(vec({1, 0}), with_zero, 1), ZeroVector);
}
