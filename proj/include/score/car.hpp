// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "score/adapter.hpp"
#include "score/corpus.hpp"
#include "score/crm.hpp"
#include "score/providers.hpp"

namespace score {

struct TrainingPair {
    int anchor;                  // user index
    std::vector<int> positives;  // collaborative neighbors, anchor excluded
};

struct TrainingPairSet {
    std::vector<TrainingPair> entries;
    std::size_t skipped_anchors = 0;  // users without a collaborative embedding
};

/// One entry per embeddable user; positives are the K_c most similar users
/// from the collaborative model.
TrainingPairSet build_training_pairs(const Corpus& corpus, const CrmModel& model, int k_c);

/// In-batch contrastive objective: every positive of every other anchor in
/// the batch acts as a negative. Embeddings must be unit.
double car_loss(const std::vector<EmbeddingVector>& anchors,
                const std::vector<std::vector<EmbeddingVector>>& positives, double tau);

struct CarTrainConfig {
    double tau = 0.1;
    int epochs = 50;
    double lr = 0.1;
    int batch_size = 16;
    std::uint64_t seed = 42;
    int max_items = 15;
};

/// Mini-batch gradient descent on car_loss over projected behavior-text
/// embeddings. W starts at identity plus seeded noise; base embeddings stay
/// frozen. Deterministic under config.seed.
Adapter train_car_adapter(const TrainingPairSet& pairs, const Corpus& corpus,
                          EmbedProvider& provider, const CarTrainConfig& config,
                          AdapterTrainInfo* info = nullptr);

/// Exact-search index of projected behavior-text embeddings, one row per
/// user with a non-empty positive history, ids ascending.
struct BehaviorIndex {
    std::vector<std::string> ids;
    Matrix rows;  // unit rows, same order as ids
};

BehaviorIndex build_behavior_index(const Corpus& corpus, const Adapter& adapter,
                                   EmbedProvider& provider, int max_items);

/// Exact top-k by cosine, excluding `exclude`, descending, ties by
/// ascending user id; k clamps to the number of available rows.
std::vector<std::pair<std::string, double>> retrieve(const BehaviorIndex& index,
                                                     const EmbeddingVector& query, int k_e,
                                                     const std::string& exclude);

void save_index(const BehaviorIndex& index, const std::filesystem::path& path);
BehaviorIndex load_index(const std::filesystem::path& path);

}  // namespace score
