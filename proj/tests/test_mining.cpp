#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "embench/mining.hpp"
#include "embench/rng.hpp"

using namespace embench;

namespace {

EmbeddingVector vec(std::vector<float> v) { return EmbeddingVector::of(std::move(v)); }

EmbeddingVector unit_at_angle(double theta) {
    return vec({static_cast<float>(std::cos(theta)), static_cast<float>(std::sin(theta))});
}

// Corpus with a planted similarity ordering: doc i has cosine cos(theta_i)
// to the query e0, theta increasing with i.
struct Planted {
    Corpus corpus;
    std::vector<std::string> texts;
    EmbeddingVector query = unit_at_angle(0.0);

    explicit Planted(size_t n) {
        for (size_t i = 0; i < n; ++i) {
            char id[16];
            std::snprintf(id, sizeof id, "d%03zu", i);
            corpus.emplace_back(id, unit_at_angle(0.01 + 0.0145 * static_cast<double>(i)));
            texts.push_back(std::string("text of ") + id);
        }
    }
};

EmbeddingVector random_unit(Rng& rng, size_t dim) {
    std::vector<float> v(dim);
    double norm = 0;
    for (auto& x : v) {
        x = static_cast<float>(rng.uniform(-1, 1));
        norm += x * x;
    }
    for (auto& x : v) x = static_cast<float>(x / std::sqrt(norm));
    return vec(std::move(v));
}

} // namespace

TEST_CASE("mining returns the next n docs after removing the positive") {
    Planted p(4);  // ranking: d000 > d001 > d002 > d003
    auto mined = mine_hard_negatives("q", p.query, "d000", p.corpus, p.texts, 2, 0);
    REQUIRE(mined.negatives.size() == 2);
    CHECK(mined.negatives[0] == "text of d001");
    CHECK(mined.negatives[1] == "text of d002");
    CHECK(mined.negative_ranks == std::vector<size_t>{2, 3});
    CHECK(mined.positive == "text of d000");
}

TEST_CASE("positive ranked mid-list is excluded wherever found") {
    Planted p(4);
    auto mined = mine_hard_negatives("q", p.query, "d002", p.corpus, p.texts, 2, 0);
    REQUIRE(mined.negatives.size() == 2);
    CHECK(mined.negatives[0] == "text of d000");
    CHECK(mined.negatives[1] == "text of d001");
    CHECK(mined.negative_ranks == std::vector<size_t>{1, 2});
}

TEST_CASE("skip_top skips past likely false negatives") {
    Planted p(6);
    auto mined = mine_hard_negatives("q", p.query, "d000", p.corpus, p.texts, 2, 2);
    CHECK(mined.negatives[0] == "text of d003");
    CHECK(mined.negatives[1] == "text of d004");
}

TEST_CASE("mining error cases") {
    Planted p(4);
    CHECK_THROWS_AS(mine_hard_negatives("q", p.query, "d000", p.corpus, p.texts, 4, 0),
                    CorpusTooSmall);
    CHECK_THROWS_AS(mine_hard_negatives("q", p.query, "d999", p.corpus, p.texts, 1, 0),
                    UnknownPositive);
    CHECK_THROWS_AS(mine_hard_negatives("q", p.query, "d000", p.corpus, p.texts, 3, 1),
                    CorpusTooSmall);
}

TEST_CASE("mined ranks are strictly increasing and exclude the positive") {
    Planted p(40);
    Rng rng(404);
    for (int trial = 0; trial < 500; ++trial) {
        size_t pos = rng.bounded(40);
        size_t n = 1 + rng.bounded(10);
        size_t skip = rng.bounded(5);
        if (n + skip > 39) continue;
        char pid[16];
        std::snprintf(pid, sizeof pid, "d%03zu", pos);
        auto mined = mine_hard_negatives("q", p.query, pid, p.corpus, p.texts, n, skip);
        CHECK(mined.negatives.size() == n);
        for (const auto& neg : mined.negatives) CHECK(neg != mined.positive);
        for (size_t i = 1; i < mined.negative_ranks.size(); ++i)
            CHECK(mined.negative_ranks[i] > mined.negative_ranks[i - 1]);
    }
}

TEST_CASE("mining output is independent of corpus order") {
    Planted p(20);
    Corpus shuffled = p.corpus;
    std::vector<std::string> shuffled_texts = p.texts;
    Rng rng(11);
    for (size_t i = shuffled.size() - 1; i > 0; --i) {
        size_t j = rng.bounded(i + 1);
        std::swap(shuffled[i], shuffled[j]);
        std::swap(shuffled_texts[i], shuffled_texts[j]);
    }
    auto a = mine_hard_negatives("q", p.query, "d005", p.corpus, p.texts, 5, 1);
    auto b = mine_hard_negatives("q", p.query, "d005", shuffled, shuffled_texts, 5, 1);
    CHECK(a.negatives == b.negatives);
    CHECK(a.negative_ranks == b.negative_ranks);
}

TEST_CASE("the default sweep grid is 1,3,7,15,31") {
    auto grid = supported_negative_counts();
    CHECK(grid == std::vector<int>{1, 3, 7, 15, 31});
    CHECK(std::find(grid.begin(), grid.end(), 15) != grid.end());
    CHECK(std::find(grid.begin(), grid.end(), 7) != grid.end());
}

TEST_CASE("info_nce hand-checked values") {
    auto q = vec({1, 0});
    auto pos = vec({1, 0});
    CHECK(info_nce(q, pos, {}, 0.05) == doctest::Approx(0.0));

    // cos(q,pos)=1, one negative at cos=-1, temperature 1:
    // -ln(e / (e + 1/e)) = ln(1 + e^-2)
    auto neg = vec({-1, 0});
    CHECK(info_nce(q, pos, {neg}, 1.0) == doctest::Approx(0.12693).epsilon(1e-4));
    CHECK(info_nce(q, pos, {neg}, 1.0) ==
          doctest::Approx(std::log1p(std::exp(-2.0))).epsilon(1e-12));

    // a negative identical to the positive contributes ln 2 at any temperature
    for (double tau : {0.05, 0.5, 1.0, 7.0}) {
        CHECK(info_nce(q, pos, {pos}, tau) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(info_nce(q, pos, {}, 0.0), NonPositiveTemperature);
    CHECK_THROWS_AS(info_nce(q, pos, {}, -1.0), NonPositiveTemperature);
    CHECK_THROWS_AS(info_nce(q, vec({1, 0, 0}), {}, 1.0), DimensionMismatch);
}

TEST_CASE("info_nce never decreases when a negative is added") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        auto q = random_unit(rng, 8);
        auto pos = random_unit(rng, 8);
        std::vector<EmbeddingVector> negs;
        double before = info_nce(q, pos, negs);
        for (int i = 0; i < 4; ++i) {
            negs.push_back(random_unit(rng, 8));
            double after = info_nce(q, pos, negs);
            CHECK(after >= before - 1e-12);
            before = after;
        }
    }
}

TEST_CASE("replacing a negative with a harder one never lowers the loss") {
    Rng rng(31337);
    for (int trial = 0; trial < 300; ++trial) {
        auto q = random_unit(rng, 6);
        auto pos = random_unit(rng, 6);
        auto n1 = random_unit(rng, 6);
        auto n2 = random_unit(rng, 6);
        const auto& easier = cosine(q, n1) <= cosine(q, n2) ? n1 : n2;
        const auto& harder = cosine(q, n1) <= cosine(q, n2) ? n2 : n1;
        CHECK(info_nce(q, pos, {harder}) >= info_nce(q, pos, {easier}) - 1e-12);
    }
}

TEST_CASE("tiny temperature does not overflow") {
    auto q = vec({1, 0});
    auto pos = vec({0, 1});
    auto neg = vec({1, 0});
    double loss = info_nce(q, pos, {neg}, 1e-4);
    CHECK(std::isfinite(loss));
    CHECK(loss > 100.0);  // (1-0)/1e-4 in the exponent, log-space keeps it finite
}
