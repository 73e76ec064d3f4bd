// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "score/adapter.hpp"
#include "score/corpus.hpp"
#include "score/providers.hpp"

namespace score {

/// Self-assessment request for a target user-item pair: asks which extra
/// preference characteristics would make the call confidently.
std::string assessment_prompt(const std::string& history_text,
                              const std::string& target_item_text);

struct AssessmentRecord {
    std::string user;
    std::string item;
    std::string text;
    EmbeddingVector embedding;  // from the fixed (non-adapter) embedder
};

struct AssessmentBatch {
    std::vector<AssessmentRecord> records;
    std::size_t skipped = 0;  // provider failures or unusable pairs
};

/// One record per (user index, item index) pair; provider failures are
/// skipped and counted, not fatal.
AssessmentBatch generate_assessments(LlmProvider& llm, const Corpus& corpus,
                                     const std::vector<std::pair<int, int>>& pairs,
                                     EmbedProvider& fixed_embedder, int max_items);

void save_assessments(const std::filesystem::path& path,
                      const std::vector<AssessmentRecord>& records);
std::vector<AssessmentRecord> load_assessments(const std::filesystem::path& path);

struct RankedCandidate {
    std::string user;
    double score;  // cosine alignment with the assessment
};

/// Reasoning-aligned ranking over retrieved candidates.
struct OrderedCandidateSet {
    std::string user;  // target pair
    std::string item;
    std::vector<RankedCandidate> ranked;  // descending, ties by ascending id
};

/// Candidates scored by cosine between the assessment embedding and the
/// fixed embedding of each candidate's behavior text.
OrderedCandidateSet ranking_from_assessment(
    const AssessmentRecord& assessment,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    EmbedProvider& fixed_embedder);

struct NegativeSample {
    std::vector<std::string> users;  // sorted by id
    bool clamped = false;            // tail shorter than neg_count
};

/// Draw neg_count users uniformly without replacement from ranks strictly
/// after rank_threshold. The rank-1 user can never appear.
NegativeSample sample_negatives(const OrderedCandidateSet& ranking, int rank_threshold,
                                int neg_count, std::uint64_t seed);

/// InfoNCE over one positive and a set of negatives; zero negatives gives
/// exactly 0.
double sare_loss(const EmbeddingVector& query, const EmbeddingVector& positive,
                 const std::vector<EmbeddingVector>& negatives, double tau);

struct SareTrainConfig {
    double tau = 0.02;
    int epochs = 50;
    double lr = 0.002;
    std::uint64_t seed = 42;
    int max_items = 15;
    int rank_threshold = 5;
    int neg_count = 3;
};

/// Full-batch gradient descent on the mean InfoNCE loss. Per ranking: the
/// query is the projected embedding of the basic recommendation prompt,
/// the positive is the rank-1 user's behavior text, negatives come from
/// sample_negatives (drawn once, seed-derived per instance).
Adapter train_sare_adapter(const std::vector<OrderedCandidateSet>& rankings,
                           const Corpus& corpus, EmbedProvider& provider,
                           const SareTrainConfig& config, AdapterTrainInfo* info = nullptr);

/// Score candidates by cosine of adapter-projected embeddings against the
/// projected basic-prompt embedding; top k_s user ids, descending.
std::vector<std::string> rerank(const Adapter& adapter, const std::string& basic_prompt_text,
                                const std::vector<std::pair<std::string, std::string>>& candidates,
                                int k_s, EmbedProvider& provider);

}  // namespace score
