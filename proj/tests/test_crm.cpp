// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "score/crm.hpp"
#include "score/eval.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace score;
using score::testing::TempDir;

namespace {

CrmConfig small_config() {
    CrmConfig cfg;
    cfg.d = 16;
    cfg.epochs = 30;
    cfg.lr = 0.05;
    cfg.l2 = 1e-4;
    cfg.seed = 42;
    return cfg;
}

std::vector<Interaction> toy_train() {
    return {{0, 0, 1, 10}, {0, 1, 1, 20}, {1, 0, 1, 10}, {1, 2, 1, 20}};
}

}  // namespace

TEST_CASE("epochs = 0 leaves factors at the seeded initialization") {
    CrmConfig cfg = small_config();
    cfg.epochs = 0;
    const auto model = train_bpr_mf(toy_train(), 2, 3, cfg);

    // Replay the documented init recipe: uniform(-0.1/sqrt(d), 0.1/sqrt(d)),
    // user rows first, then item rows, one stream from the seed.
    Rng rng(cfg.seed);
    const double scale = 0.1 / std::sqrt(static_cast<double>(cfg.d));
    for (std::size_t r = 0; r < model.n_users(); ++r)
        for (double x : model.user_factors().row(r))
            CHECK(x == rng.uniform(-scale, scale));
    for (std::size_t r = 0; r < model.n_items(); ++r)
        for (double x : model.item_factors().row(r))
            CHECK(x == rng.uniform(-scale, scale));
}

TEST_CASE("pairwise loss at zero margin is ln 2") {
    CHECK(std::abs(bpr_pair_loss(0.0) - std::log(2.0)) < 1e-12);
    CHECK(bpr_pair_loss(50.0) < 1e-12);
    CHECK(bpr_pair_loss(-50.0) == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("config validation") {
    CrmConfig cfg = small_config();
    cfg.d = 0;
    CHECK_THROWS_AS(train_bpr_mf(toy_train(), 2, 3, cfg), ConfigError);
    cfg = small_config();
    cfg.lr = 0.0;
    CHECK_THROWS_AS(train_bpr_mf(toy_train(), 2, 3, cfg), ConfigError);
    CHECK_THROWS_AS(train_bpr_mf({}, 2, 3, small_config()), DomainError);
}

TEST_CASE("analytic BPR gradient matches central finite differences") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 8;
        Vec pu(d), qi(d), qj(d);
        for (auto& x : pu) x = rng.uniform(-1, 1);
        for (auto& x : qi) x = rng.uniform(-1, 1);
        for (auto& x : qj) x = rng.uniform(-1, 1);

        const BprGrads g = bpr_gradients(pu, qi, qj);
        Vec fd_u, fd_i, fd_j;
        score::testing::bpr_fd_grads(pu, qi, qj, 1e-4, &fd_u, &fd_i, &fd_j);
        CHECK(score::testing::relative_error(g.user, fd_u) < 1e-3);
        CHECK(score::testing::relative_error(g.pos, fd_i) < 1e-3);
        CHECK(score::testing::relative_error(g.neg, fd_j) < 1e-3);
    }
}

TEST_CASE("sequence embedding") {
    // Two users, three items with explicit rows.
    Matrix users(2, 2);
    Matrix items(3, 2);
    items(0, 0) = 1.0;
    items(0, 1) = 3.0;
    items(1, 0) = 2.0;
    items(1, 1) = -1.0;
    items(2, 0) = 0.5;
    items(2, 1) = 0.5;
    users(0, 0) = 4.0;
    users(1, 1) = 5.0;
    const CrmModel model(std::move(users), std::move(items), 1, CrmMode::MeanOfItems);

    SUBCASE("singleton history returns that item row") {
        const std::vector<int> h{1};
        CHECK(model.sequence_embedding(h) == Vec{2.0, -1.0});
    }
    SUBCASE("two items average componentwise") {
        const std::vector<int> h{0, 1};
        const Vec e = model.sequence_embedding(h);
        CHECK(e[0] == doctest::Approx((1.0 + 2.0) / 2.0));
        CHECK(e[1] == doctest::Approx((3.0 - 1.0) / 2.0));
    }
    SUBCASE("unknown item index") {
        const std::vector<int> h{7};
        CHECK_THROWS_AS(model.sequence_embedding(h), DomainError);
    }
    SUBCASE("empty history in mean-of-items mode") {
        CHECK_THROWS_AS(model.sequence_embedding({}), DomainError);
    }
}

TEST_CASE("top_k_collaborative") {
    // u0 and u1 share an identical positive history; u2 diverges.
    const auto data = [] {
        score::testing::RawDataset d;
        d.items = {{"i0", "Item Zero", {}}, {"i1", "Item One", {}}, {"i2", "Item Two", {}}};
        d.interactions = {{"u0", "i0", 5, 1}, {"u0", "i1", 5, 2}, {"u1", "i0", 5, 1},
                          {"u1", "i1", 5, 2}, {"u2", "i2", 5, 1}};
        return d;
    }();
    const auto corpus = data.to_corpus();

    Matrix users(3, 2);
    Matrix items(3, 2);
    items(0, 0) = 1.0;
    items(1, 1) = 1.0;
    items(2, 0) = 0.1;
    items(2, 1) = 0.1;
    const CrmModel model(std::move(users), std::move(items), 1, CrmMode::MeanOfItems);

    SUBCASE("identical-history twin ranks first") {
        const auto nl = top_k_collaborative(model, corpus, 0, 1);
        REQUIRE(nl.neighbors.size() == 1);
        CHECK(nl.neighbors[0].first == 1);
    }
    SUBCASE("k clamps to |U| - 1 and sorts fully") {
        const auto nl = top_k_collaborative(model, corpus, 0, 99);
        REQUIRE(nl.neighbors.size() == 2);
        CHECK(nl.neighbors[0].first == 1);
        CHECK(nl.neighbors[1].first == 2);
        CHECK(nl.neighbors[0].second >= nl.neighbors[1].second);
    }
    SUBCASE("explicit 3-user ordering matches brute force") {
        const auto nl = top_k_collaborative(model, corpus, 2, 2);
        // h2 = (0.1, 0.1); h0 = h1 = (0.5, 0.5); equal scores -> index order.
        REQUIRE(nl.neighbors.size() == 2);
        CHECK(nl.neighbors[0].first == 0);
        CHECK(nl.neighbors[1].first == 1);
        CHECK(nl.neighbors[0].second == doctest::Approx(0.1));
    }
}

TEST_CASE("single-user corpus has no neighborhood") {
    score::testing::RawDataset d;
    d.items = {{"i0", "Item Zero", {}}};
    d.interactions = {{"u0", "i0", 5, 1}};
    const auto corpus = d.to_corpus();
    Matrix users(1, 2), items(1, 2);
    items(0, 0) = 1.0;
    const CrmModel model(std::move(users), std::move(items), 1, CrmMode::MeanOfItems);
    CHECK_THROWS_AS(top_k_collaborative(model, corpus, 0, 1), DomainError);
}

TEST_CASE("top-k equals the prefix of the exhaustive sort") {
    const auto data = score::testing::make_two_block(17);
    const auto corpus = data.to_corpus();
    const auto splits = temporal_split(corpus, score::testing::synthetic_split());
    CrmConfig cfg = small_config();
    cfg.epochs = 5;
    const auto model = train_bpr_mf(splits.train, corpus.n_users(), corpus.n_items(), cfg);

    const auto embeddings = user_sequence_embeddings(model, corpus);
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int target = static_cast<int>(rng.uniform_index(corpus.n_users()));
        const int k = 1 + static_cast<int>(rng.uniform_index(corpus.n_users()));
        const auto nl = top_k_collaborative(model, corpus, target, k);

        std::vector<std::pair<int, double>> full;
        for (std::size_t u = 0; u < corpus.n_users(); ++u) {
            if (static_cast<int>(u) == target) continue;
            full.emplace_back(static_cast<int>(u), dot(embeddings[u], embeddings[target]));
        }
        std::sort(full.begin(), full.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        REQUIRE(nl.neighbors.size() == std::min<std::size_t>(k, full.size()));
        for (std::size_t i = 0; i < nl.neighbors.size(); ++i) {
            CHECK(nl.neighbors[i].first == full[i].first);
            CHECK(nl.neighbors[i].second == doctest::Approx(full[i].second).epsilon(1e-12));
        }
    }
}

TEST_CASE("two-block training: loss decreases and blocks are recovered") {
    const auto data = score::testing::make_two_block(42);
    const auto corpus = data.to_corpus();
    const auto splits = temporal_split(corpus, score::testing::synthetic_split());

    std::vector<double> losses;
    const auto model =
        train_bpr_mf(splits.train, corpus.n_users(), corpus.n_items(), small_config(), &losses);

    SUBCASE("mean epoch loss is non-increasing over the first five epochs") {
        REQUIRE(losses.size() >= 5);
        for (int e = 1; e < 5; ++e) CHECK(losses[e] <= losses[e - 1]);
    }
    SUBCASE("held-out AUC is high") {
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& rec : splits.test) {
            scores.push_back(model.predict(rec.user, rec.item));
            labels.push_back(rec.label);
        }
        CHECK(auc(scores, labels) >= 0.95);
    }
    SUBCASE("top-5 collaborative neighbors stay within the block") {
        double same = 0.0, total = 0.0;
        for (std::size_t u = 0; u < corpus.n_users(); ++u) {
            const auto nl = top_k_collaborative(model, corpus, static_cast<int>(u), 5);
            const int g = score::testing::two_block_group(corpus.user_id(u));
            for (const auto& [v, s] : nl.neighbors) {
                total += 1.0;
                if (score::testing::two_block_group(corpus.user_id(v)) == g) same += 1.0;
            }
        }
        CHECK(same / total >= 0.9);
    }
    SUBCASE("training is deterministic under the seed") {
        const auto again = train_bpr_mf(splits.train, corpus.n_users(), corpus.n_items(),
                                        small_config());
        CHECK(again.user_factors().data() == model.user_factors().data());
        CHECK(again.item_factors().data() == model.item_factors().data());
    }
}

TEST_CASE("model artifact round-trips through the binary format") {
    const auto data = score::testing::make_two_block(42);
    const auto corpus = data.to_corpus();
    const auto splits = temporal_split(corpus, score::testing::synthetic_split());
    CrmConfig cfg = small_config();
    cfg.epochs = 2;
    const auto model = train_bpr_mf(splits.train, corpus.n_users(), corpus.n_items(), cfg);

    TempDir tmp;
    model.save(tmp.path() / "crm.bin");
    const auto loaded = CrmModel::load(tmp.path() / "crm.bin");
    REQUIRE(loaded.dim() == model.dim());
    REQUIRE(loaded.n_users() == model.n_users());
    REQUIRE(loaded.n_items() == model.n_items());
    // Values round through f32.
    for (std::size_t r = 0; r < model.n_users(); ++r)
        for (std::size_t c = 0; c < static_cast<std::size_t>(model.dim()); ++c)
            CHECK(loaded.user_factors()(r, c) ==
                  static_cast<double>(static_cast<float>(model.user_factors()(r, c))));
}
