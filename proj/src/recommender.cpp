// SPDX-License-Identifier: Apache-2.0
#include "score/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "score/io.hpp"

namespace score {

double yes_probability(const JudgeResult& logits) {
    if (!std::isfinite(logits.logit_yes) || !std::isfinite(logits.logit_no))
        throw DomainError("non-finite judge logits");
    const double diff = logits.logit_yes - logits.logit_no;
    if (diff >= 0) return 1.0 / (1.0 + std::exp(-diff));
    const double e = std::exp(diff);
    return e / (1.0 + e);
}

double predict(LlmProvider& judge, const std::string& prompt) {
    if (prompt.empty()) throw DomainError("empty prompt");
    return yes_probability(judge.judge(prompt));
}

PredictionRecord recommend(const Corpus& corpus, int user, int item, int label,
                           const PipelineArtifacts& artifacts, EmbedProvider& embedder,
                           LlmProvider& judge, const RecommendConfig& config,
                           PipelineStats* stats) {
    if (user < 0 || user >= static_cast<int>(corpus.n_users()))
        throw DomainError("unknown user index " + std::to_string(user));
    if (item < 0 || item >= static_cast<int>(corpus.n_items()))
        throw DomainError("unknown item index " + std::to_string(item));
    if (config.k_s < 0) throw ConfigError("k_s must be >= 0");
    if (corpus.positives(user).empty())
        throw DomainError("cold start: user " + corpus.user_id(user) +
                          " has no positive history");

    const std::string history = behavior_text(corpus, user, config.max_items);
    const std::string target = item_text(corpus.item(item));

    PredictionRecord rec;
    rec.user = corpus.user_id(user);
    rec.item = corpus.item(item).item_id;
    rec.label = label;

    if (config.k_s > 0) {
        if (!artifacts.car_adapter || !artifacts.index || !artifacts.sare_adapter)
            throw DomainError("missing pipeline artifacts for CI retrieval");
        const auto query_base = embedder.embed({history});
        if (query_base.size() != 1 || query_base.front().zero)
            throw ProviderError("embedding provider failed on history text");
        const EmbeddingVector query = adapter_embed(*artifacts.car_adapter, query_base.front());

        const auto candidates =
            retrieve(*artifacts.index, query, config.k_e, corpus.user_id(user));
        if (stats) stats->retrieve_calls.fetch_add(1);

        std::vector<std::pair<std::string, std::string>> candidate_texts;
        candidate_texts.reserve(candidates.size());
        for (const auto& [id, score_] : candidates) {
            const auto idx = corpus.user_index(id);
            if (!idx) throw DomainError("index references unknown user " + id);
            candidate_texts.emplace_back(id, behavior_text(corpus, *idx, config.max_items));
        }
        if (!candidate_texts.empty()) {
            rec.ci_users = rerank(*artifacts.sare_adapter, basic_prompt(history, target),
                                  candidate_texts, config.k_s, embedder);
            if (stats) stats->rerank_calls.fetch_add(1);
        }
    }

    std::vector<std::string> behaviors;
    behaviors.reserve(rec.ci_users.size());
    for (const auto& id : rec.ci_users) {
        const auto idx = corpus.user_index(id);
        if (!idx) throw DomainError("rerank returned unknown user " + id);
        behaviors.push_back(behavior_text(corpus, *idx, config.max_items));
    }
    rec.prompt = ci_prompt(history, behaviors, target);
    rec.prob = predict(judge, rec.prompt);
    return rec;
}

std::vector<PredictionRecord> predict_batch(const Corpus& corpus,
                                            const std::vector<Interaction>& pairs,
                                            const PipelineArtifacts& artifacts,
                                            EmbedProvider& embedder, LlmProvider& judge,
                                            const RecommendConfig& config, int concurrency,
                                            std::size_t* skipped_cold, PipelineStats* stats) {
    std::vector<const Interaction*> usable;
    std::size_t cold = 0;
    for (const Interaction& p : pairs) {
        if (p.user < 0 || p.user >= static_cast<int>(corpus.n_users()))
            throw DomainError("pair references unknown user index");
        if (corpus.positives(p.user).empty()) {
            ++cold;
            continue;
        }
        usable.push_back(&p);
    }
    if (skipped_cold) *skipped_cold = cold;
    if (cold)
        std::cerr << "warning: skipped " << cold << " pairs for users without positive history\n";

    std::vector<PredictionRecord> records(usable.size());
    parallel_for(usable.size(), concurrency, [&](std::size_t i) {
        const Interaction& p = *usable[i];
        records[i] =
            recommend(corpus, p.user, p.item, p.label, artifacts, embedder, judge, config, stats);
    });
    std::sort(records.begin(), records.end(),
              [](const PredictionRecord& a, const PredictionRecord& b) {
                  if (a.user != b.user) return a.user < b.user;
                  return a.item < b.item;
              });
    return records;
}

void save_predictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        nlohmann::json j;
        j["user"] = rec.user;
        j["item"] = rec.item;
        j["ci_users"] = rec.ci_users;
        j["prob"] = rec.prob;
        j["label"] = rec.label;
        out += j.dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    std::vector<PredictionRecord> out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) end = data.size();
        ++line_no;
        const std::string_view line(data.data() + start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            PredictionRecord rec;
            rec.user = j.at("user").get<std::string>();
            rec.item = j.at("item").get<std::string>();
            rec.ci_users = j.at("ci_users").get<std::vector<std::string>>();
            rec.prob = j.at("prob").get<double>();
            rec.label = j.at("label").get<int>();
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.filename().string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return out;
}

}  // namespace score
