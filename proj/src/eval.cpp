// SPDX-License-Identifier: Apache-2.0
#include "score/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <json.hpp>

namespace score {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw MetricError("scores/labels size mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw MetricError("labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(l);
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw MetricError("undefined metric: need at least one positive and one negative");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups; AUC from the rank-sum of positives.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[idx[k]] == 1) pos_rank_sum += midrank;
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

UaucResult uauc(const std::vector<PredictionRecord>& records) {
    if (records.empty()) throw MetricError("no records");
    std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> by_user;
    for (const auto& rec : records) {
        auto& entry = by_user[rec.user];
        entry.first.push_back(rec.prob);
        entry.second.push_back(rec.label);
    }
    UaucResult out;
    double sum = 0.0;
    for (const auto& [user, entry] : by_user) {
        const auto& [scores, labels] = entry;
        const std::size_t n_pos =
            static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
        if (n_pos == 0 || n_pos == labels.size()) {
            ++out.skipped;
            continue;
        }
        sum += auc(scores, labels);
        ++out.evaluated;
    }
    if (out.evaluated == 0)
        throw MetricError("undefined metric: no user has both label classes");
    out.value = sum / static_cast<double>(out.evaluated);
    return out;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["auc"] = report.auc;
    j["uauc"] = report.uauc;
    j["n_pairs"] = report.n_pairs;
    j["n_users_evaluated"] = report.n_users_evaluated;
    j["n_users_skipped"] = report.n_users_skipped;
    j["config_digest"] = report.config_digest;
    j["seed"] = report.seed;
    return j.dump(2) + "\n";
}

EvalReport run_experiment(const Corpus& corpus, const std::vector<Interaction>& test_pairs,
                          const PipelineArtifacts& artifacts, EmbedProvider& embedder,
                          LlmProvider& judge, const RecommendConfig& config, int concurrency,
                          std::uint64_t seed, const std::string& config_digest,
                          std::vector<PredictionRecord>* records_out) {
    const auto records = predict_batch(corpus, test_pairs, artifacts, embedder, judge, config,
                                       concurrency, nullptr, nullptr);
    if (records.empty()) throw MetricError("no scorable test pairs");

    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(records.size());
    for (const auto& rec : records) {
        scores.push_back(rec.prob);
        labels.push_back(rec.label);
    }
    EvalReport report;
    report.auc = auc(scores, labels);
    const UaucResult u = uauc(records);
    report.uauc = u.value;
    report.n_pairs = records.size();
    report.n_users_evaluated = u.evaluated;
    report.n_users_skipped = u.skipped;
    report.config_digest = config_digest;
    report.seed = seed;
    if (records_out) *records_out = records;
    return report;
}

}  // namespace score
