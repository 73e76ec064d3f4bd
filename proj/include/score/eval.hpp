// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "score/recommender.hpp"

namespace score {

/// Probability that a uniformly random positive outranks a uniformly
/// random negative; ties contribute 0.5. Computed by rank statistics.
/// Throws MetricError when labels are single-class.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct UaucResult {
    double value = 0.0;
    std::size_t evaluated = 0;  // users with both label classes
    std::size_t skipped = 0;    // single-class users
};

/// Per-user AUC averaged uniformly over users with both label classes.
UaucResult uauc(const std::vector<PredictionRecord>& records);

struct EvalReport {
    double auc = 0.0;
    double uauc = 0.0;
    std::size_t n_pairs = 0;
    std::size_t n_users_evaluated = 0;
    std::size_t n_users_skipped = 0;
    std::string config_digest;
    std::uint64_t seed = 0;
};

std::string report_to_json(const EvalReport& report);

/// Score every test pair through the recommender and compute both metrics.
/// Deterministic under fixed seed and stub providers.
EvalReport run_experiment(const Corpus& corpus, const std::vector<Interaction>& test_pairs,
                          const PipelineArtifacts& artifacts, EmbedProvider& embedder,
                          LlmProvider& judge, const RecommendConfig& config, int concurrency,
                          std::uint64_t seed, const std::string& config_digest,
                          std::vector<PredictionRecord>* records_out = nullptr);

}  // namespace score
