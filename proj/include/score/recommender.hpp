// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "score/car.hpp"
#include "score/corpus.hpp"
#include "score/prompts.hpp"
#include "score/providers.hpp"
#include "score/sare.hpp"

namespace score {

/// Yes-probability from judge logits: softmax over {Yes, No}, computed
/// stably via the logit difference.
double yes_probability(const JudgeResult& logits);

/// Ask the judge provider for next-token logits on `prompt` and normalize.
double predict(LlmProvider& judge, const std::string& prompt);

struct PredictionRecord {
    std::string user;
    std::string item;
    std::vector<std::string> ci_users;  // rerank order, length <= k_s
    std::string prompt;
    double prob = 0.0;
    int label = 0;
};

struct RecommendConfig {
    int k_e = 10;
    int k_s = 2;
    int max_items = 15;
};

/// Counters for pipeline tests.
struct PipelineStats {
    std::atomic<long> retrieve_calls{0};
    std::atomic<long> rerank_calls{0};
};

struct PipelineArtifacts {
    const Adapter* car_adapter = nullptr;
    const BehaviorIndex* index = nullptr;
    const Adapter* sare_adapter = nullptr;
};

/// Two-step inference for one target pair: retrieve K_e similar users with
/// the retriever adapter, rerank to K_s with the reranker adapter, render
/// their behaviors into the CI prompt, and judge. k_s = 0 skips both steps
/// and degrades to the basic prompt.
PredictionRecord recommend(const Corpus& corpus, int user, int item, int label,
                           const PipelineArtifacts& artifacts, EmbedProvider& embedder,
                           LlmProvider& judge, const RecommendConfig& config,
                           PipelineStats* stats = nullptr);

/// Score a batch of labeled pairs with bounded concurrency. Pairs whose
/// user has no positive history are skipped and counted. Output is sorted
/// by (user, item).
std::vector<PredictionRecord> predict_batch(const Corpus& corpus,
                                            const std::vector<Interaction>& pairs,
                                            const PipelineArtifacts& artifacts,
                                            EmbedProvider& embedder, LlmProvider& judge,
                                            const RecommendConfig& config, int concurrency,
                                            std::size_t* skipped_cold = nullptr,
                                            PipelineStats* stats = nullptr);

/// JSON Lines: {"user":...,"item":...,"ci_users":[...],"prob":...,"label":...}
void save_predictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

}  // namespace score
