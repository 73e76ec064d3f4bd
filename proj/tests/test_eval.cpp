// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "score/eval.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace score;

namespace {

PredictionRecord rec(const std::string& user, const std::string& item, double prob,
                     int label) {
    PredictionRecord r;
    r.user = user;
    r.item = item;
    r.prob = prob;
    r.label = label;
    return r;
}

}  // namespace

TEST_CASE("auc analytic cases") {
    SUBCASE("perfect separation") {
        CHECK(auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("frozen mixed ordering") {
        // Oracle: pairs (0.9>0.8)=1, (0.9>0.6)=1, (0.7<0.8)=0, (0.7>0.6)=1 -> 3/4.
        const std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
        const std::vector<int> labels{1, 0, 1, 0};
        CHECK(score::testing::auc_pairwise(scores, labels) == doctest::Approx(0.75));
        CHECK(auc(scores, labels) == doctest::Approx(0.75).epsilon(1e-15));
    }
    SUBCASE("identical scores give exactly one half") {
        CHECK(auc({0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 0}) == 0.5);
    }
    SUBCASE("single-class labels are undefined") {
        CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), MetricError);
        CHECK_THROWS_AS(auc({0.1, 0.2}, {0, 0}), MetricError);
    }
}

TEST_CASE("rank-statistic auc equals the pairwise oracle on random instances") {
    Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(199);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse grid forces plenty of ties.
            scores[i] = std::floor(rng.uniform() * 8.0) / 8.0;
            labels[i] = rng.uniform() < 0.5 ? 1 : 0;
            has_pos |= labels[i] == 1;
            has_neg |= labels[i] == 0;
        }
        if (!has_pos) labels[0] = 1;
        if (!has_neg) labels[n - 1] = 0;
        const double fast = auc(scores, labels);
        const double slow = score::testing::auc_pairwise(scores, labels);
        CHECK(std::abs(fast - slow) <= 1e-12);
    }
}

TEST_CASE("auc invariances") {
    Rng rng(321);
    std::vector<double> scores(60);
    std::vector<int> labels(60);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = rng.uniform();
        labels[i] = i % 3 == 0 ? 1 : 0;
    }
    SUBCASE("invariant under strictly monotone transforms") {
        const double base = auc(scores, labels);
        std::vector<double> logit(scores.size()), cubed(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            logit[i] = std::log(scores[i] + 1e-9) - std::log(1.0 - scores[i] + 1e-9);
            cubed[i] = scores[i] * scores[i] * scores[i] + 7.0;
        }
        CHECK(auc(logit, labels) == doctest::Approx(base).epsilon(1e-12));
        CHECK(auc(cubed, labels) == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("complement identity for tie-free scores") {
        std::vector<int> flipped(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) flipped[i] = 1 - labels[i];
        CHECK(auc(scores, labels) + auc(scores, flipped) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("uauc") {
    SUBCASE("one user reduces to that user's auc") {
        const std::vector<PredictionRecord> records{
            rec("u1", "a", 0.9, 1), rec("u1", "b", 0.4, 0), rec("u1", "c", 0.6, 0)};
        const auto out = uauc(records);
        CHECK(out.value == doctest::Approx(auc({0.9, 0.4, 0.6}, {1, 0, 0})));
        CHECK(out.evaluated == 1);
        CHECK(out.skipped == 0);
    }
    SUBCASE("averages per-user aucs uniformly") {
        // u1: perfect (1.0); u2: all tied (0.5) -> mean 0.75.
        const std::vector<PredictionRecord> records{
            rec("u1", "a", 0.9, 1), rec("u1", "b", 0.1, 0), rec("u2", "a", 0.5, 1),
            rec("u2", "b", 0.5, 0)};
        const auto out = uauc(records);
        CHECK(out.value == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(out.evaluated == 2);
    }
    SUBCASE("single-class users are skipped and counted") {
        const std::vector<PredictionRecord> records{
            rec("u1", "a", 0.9, 1), rec("u1", "b", 0.1, 0), rec("u2", "a", 0.8, 1),
            rec("u2", "b", 0.7, 1)};
        const auto out = uauc(records);
        CHECK(out.evaluated == 1);
        CHECK(out.skipped == 1);
        CHECK(out.evaluated + out.skipped == 2);
    }
    SUBCASE("no evaluable user is an error") {
        const std::vector<PredictionRecord> records{rec("u1", "a", 0.9, 1),
                                                    rec("u2", "a", 0.2, 0)};
        CHECK_THROWS_AS(uauc(records), MetricError);
        CHECK_THROWS_AS(uauc({}), MetricError);
    }
}

TEST_CASE("report JSON has the exact field set") {
    EvalReport report;
    report.auc = 0.75;
    report.uauc = 0.5;
    report.n_pairs = 10;
    report.n_users_evaluated = 3;
    report.n_users_skipped = 1;
    report.config_digest = "deadbeef01234567";
    report.seed = 42;
    const std::string json = report_to_json(report);
    for (const char* key : {"\"auc\"", "\"uauc\"", "\"n_pairs\"", "\"n_users_evaluated\"",
                            "\"n_users_skipped\"", "\"config_digest\"", "\"seed\""})
        CHECK(json.find(key) != std::string::npos);
    CHECK(report_to_json(report) == json);
}

TEST_CASE("run_experiment is deterministic under stub providers") {
    const auto data = score::testing::make_planted_signal(5);
    const auto full = data.to_corpus();
    const Corpus corpus = full.restricted(2000);
    const auto splits = temporal_split(full, score::testing::synthetic_split());

    HashEmbedProvider embedder(128);
    auto llm = StubLlmProvider::from_corpus(corpus);
    const Adapter car_adapter = make_adapter(128, 0.1, 21);
    const Adapter sare_adapter = make_adapter(128, 0.02, 22);
    const auto index = build_behavior_index(corpus, car_adapter, embedder, 15);
    PipelineArtifacts artifacts{&car_adapter, &index, &sare_adapter};
    RecommendConfig cfg;

    std::vector<PredictionRecord> records_a, records_b;
    const auto report_a = run_experiment(corpus, splits.test, artifacts, embedder, llm, cfg, 4,
                                         42, "digest", &records_a);
    const auto report_b = run_experiment(corpus, splits.test, artifacts, embedder, llm, cfg, 1,
                                         42, "digest", &records_b);
    CHECK(report_to_json(report_a) == report_to_json(report_b));
    CHECK(report_a.n_pairs == splits.test.size());
    CHECK(report_a.n_users_evaluated + report_a.n_users_skipped == 18);  // probes only
    REQUIRE(records_a.size() == records_b.size());
    for (std::size_t i = 0; i < records_a.size(); ++i)
        CHECK(records_a[i].prob == records_b[i].prob);
}
