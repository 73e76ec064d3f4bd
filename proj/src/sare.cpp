// SPDX-License-Identifier: Apache-2.0
#include "score/sare.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "score/io.hpp"
#include "score/prompts.hpp"

namespace score {

std::string assessment_prompt(const std::string& history_text,
                              const std::string& target_item_text) {
    if (history_text.empty()) throw DomainError("empty field: history_text");
    if (target_item_text.empty()) throw DomainError("empty field: target_item_text");
    return "The user has watched the following movies: " + history_text +
           ". However, based on this list alone, it is not possible to confidently predict "
           "whether they would enjoy the movie " +
           target_item_text +
           ". What other genres or characteristics related to their preferences, apart from "
           "the given history, could help in making a more informed decision?";
}

AssessmentBatch generate_assessments(LlmProvider& llm, const Corpus& corpus,
                                     const std::vector<std::pair<int, int>>& pairs,
                                     EmbedProvider& fixed_embedder, int max_items) {
    AssessmentBatch out;
    std::vector<std::string> texts;
    std::vector<std::pair<int, int>> kept;
    for (const auto& [user, item] : pairs) {
        if (user < 0 || user >= static_cast<int>(corpus.n_users()) || item < 0 ||
            item >= static_cast<int>(corpus.n_items()))
            throw DomainError("assessment pair out of range");
        std::string text;
        try {
            const std::string prompt = assessment_prompt(
                behavior_text(corpus, user, max_items), item_text(corpus.item(item)));
            text = llm.complete(prompt);
        } catch (const Error& e) {
            std::cerr << "warning: skipping assessment for (" << corpus.user_id(user) << ", "
                      << corpus.item(item).item_id << "): " << e.what() << "\n";
            ++out.skipped;
            continue;
        }
        if (text.empty()) {
            ++out.skipped;
            continue;
        }
        texts.push_back(std::move(text));
        kept.emplace_back(user, item);
    }

    const auto embedded = fixed_embedder.embed(texts);
    if (embedded.size() != texts.size())
        throw ProviderError("embedding provider returned wrong count");
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (embedded[i].zero) {
            ++out.skipped;
            continue;
        }
        AssessmentRecord rec;
        rec.user = corpus.user_id(kept[i].first);
        rec.item = corpus.item(kept[i].second).item_id;
        rec.text = texts[i];
        rec.embedding = embedded[i];
        out.records.push_back(std::move(rec));
    }
    return out;
}

void save_assessments(const std::filesystem::path& path,
                      const std::vector<AssessmentRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        nlohmann::json j;
        j["user"] = rec.user;
        j["item"] = rec.item;
        j["text"] = rec.text;
        j["embedding"] = rec.embedding.values;
        out += j.dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<AssessmentRecord> load_assessments(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    std::vector<AssessmentRecord> out;
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
            AssessmentRecord rec;
            rec.user = j.at("user").get<std::string>();
            rec.item = j.at("item").get<std::string>();
            rec.text = j.at("text").get<std::string>();
            rec.embedding.values = j.at("embedding").get<std::vector<double>>();
            if (!(norm2(rec.embedding.values) > 1e-12)) rec.embedding.zero = true;
            out.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.filename().string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return out;
}

OrderedCandidateSet ranking_from_assessment(
    const AssessmentRecord& assessment,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    EmbedProvider& fixed_embedder) {
    if (candidates.empty()) throw DomainError("empty candidate list");
    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const auto& [id, text] : candidates) texts.push_back(text);
    const auto embedded = fixed_embedder.embed(texts);
    if (embedded.size() != candidates.size())
        throw ProviderError("embedding provider returned wrong count");

    OrderedCandidateSet out;
    out.user = assessment.user;
    out.item = assessment.item;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (embedded[i].zero)
            throw DomainError("degenerate candidate embedding for user " + candidates[i].first);
        out.ranked.push_back(
            RankedCandidate{candidates[i].first, cosine(assessment.embedding, embedded[i])});
    }
    std::sort(out.ranked.begin(), out.ranked.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.user < b.user;
              });
    return out;
}

NegativeSample sample_negatives(const OrderedCandidateSet& ranking, int rank_threshold,
                                int neg_count, std::uint64_t seed) {
    if (rank_threshold <= 0) throw ConfigError("rank_threshold must be >= 1");
    if (neg_count <= 0) throw ConfigError("neg_count must be >= 1");
    const std::size_t n = ranking.ranked.size();
    if (n <= static_cast<std::size_t>(rank_threshold))
        throw DomainError("empty tail: ranking has " + std::to_string(n) +
                          " candidates, threshold " + std::to_string(rank_threshold));

    std::vector<std::size_t> tail;
    for (std::size_t i = static_cast<std::size_t>(rank_threshold); i < n; ++i)
        tail.push_back(i);

    NegativeSample out;
    if (tail.size() <= static_cast<std::size_t>(neg_count)) {
        out.clamped = tail.size() < static_cast<std::size_t>(neg_count);
        if (out.clamped)
            std::cerr << "warning: negative tail has " << tail.size() << " users, requested "
                      << neg_count << "\n";
        for (std::size_t i : tail) out.users.push_back(ranking.ranked[i].user);
    } else {
        Rng rng(seed);
        // Partial Fisher-Yates: the first neg_count slots are the sample.
        for (int i = 0; i < neg_count; ++i) {
            const std::size_t j = i + rng.uniform_index(tail.size() - i);
            std::swap(tail[i], tail[j]);
            out.users.push_back(ranking.ranked[tail[i]].user);
        }
    }
    std::sort(out.users.begin(), out.users.end());
    return out;
}

double sare_loss(const EmbeddingVector& query, const EmbeddingVector& positive,
                 const std::vector<EmbeddingVector>& negatives, double tau) {
    if (tau <= 0) throw ConfigError("tau_sare must be > 0");
    if (query.zero || positive.zero) throw DomainError("zero embedding in loss");
    std::vector<Vec> embs{query.values, positive.values};
    ContrastiveTerm term{0, 1, {}};
    for (const auto& n : negatives) {
        if (n.zero) throw DomainError("zero embedding in loss");
        term.negatives.push_back(static_cast<int>(embs.size()));
        embs.push_back(n.values);
    }
    return contrastive_loss(embs, {term}, tau);
}

Adapter train_sare_adapter(const std::vector<OrderedCandidateSet>& rankings,
                           const Corpus& corpus, EmbedProvider& provider,
                           const SareTrainConfig& config, AdapterTrainInfo* info) {
    if (rankings.empty()) throw DomainError("no rankings to train on");
    if (config.tau <= 0) throw ConfigError("tau_sare must be > 0");
    if (config.lr < 0) throw ConfigError("sare_lr must be >= 0");
    if (config.epochs < 0) throw ConfigError("sare_epochs must be >= 0");

    // Unique texts share one base-embedding slot.
    std::vector<std::string> texts;
    std::unordered_map<std::string, int> slot_by_text;
    auto slot_for = [&](const std::string& text) {
        auto it = slot_by_text.find(text);
        if (it != slot_by_text.end()) return it->second;
        const int s = static_cast<int>(texts.size());
        texts.push_back(text);
        slot_by_text.emplace(text, s);
        return s;
    };
    auto behavior_text_of = [&](const std::string& user_id) {
        const auto u = corpus.user_index(user_id);
        if (!u) throw DomainError("unknown user id " + user_id);
        return behavior_text(corpus, *u, config.max_items);
    };

    const Rng seed_source(config.seed);
    std::vector<ContrastiveTerm> terms;
    std::size_t skipped = 0;
    for (std::size_t k = 0; k < rankings.size(); ++k) {
        const auto& ranking = rankings[k];
        if (ranking.ranked.empty() ||
            ranking.ranked.size() <= static_cast<std::size_t>(config.rank_threshold))
            throw DomainError("ranking for user " + ranking.user +
                              " has no negative tail past rank threshold");
        const auto u = corpus.user_index(ranking.user);
        const auto v = corpus.item_index(ranking.item);
        if (!u || !v) throw DomainError("ranking references unknown user or item");
        if (corpus.positives(*u).empty()) {
            ++skipped;
            continue;
        }
        const std::string query_text = basic_prompt(
            behavior_text(corpus, *u, config.max_items), item_text(corpus.item(*v)));
        ContrastiveTerm term;
        term.anchor = slot_for(query_text);
        term.positive = slot_for(behavior_text_of(ranking.ranked.front().user));
        const NegativeSample negs = sample_negatives(ranking, config.rank_threshold,
                                                     config.neg_count, seed_source.fork(k));
        for (const auto& id : negs.users) term.negatives.push_back(slot_for(behavior_text_of(id)));
        terms.push_back(std::move(term));
    }
    if (terms.empty()) throw DomainError("no usable rankings to train on");
    if (skipped)
        std::cerr << "warning: skipped " << skipped << " rankings without usable history\n";

    const auto embedded = provider.embed(texts);
    if (embedded.size() != texts.size())
        throw ProviderError("embedding provider returned wrong count");
    std::vector<Vec> bases;
    bases.reserve(embedded.size());
    for (std::size_t i = 0; i < embedded.size(); ++i) {
        if (embedded[i].zero) throw DomainError("zero embedding for training text");
        bases.push_back(embedded[i].values);
    }

    Adapter adapter = make_adapter(provider.dim(), config.tau, config.seed);
    const double denom = static_cast<double>(terms.size());
    if (info) {
        info->initial_loss =
            contrastive_loss_grad(adapter.W, bases, terms, config.tau, nullptr) / denom;
        info->instances = terms.size();
    }
    const std::size_t dim = adapter.dim();
    Matrix grad(dim, dim);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::fill(grad.data().begin(), grad.data().end(), 0.0);
        contrastive_loss_grad(adapter.W, bases, terms, config.tau, &grad);
        const double scale = config.lr / denom;
        for (std::size_t i = 0; i < grad.data().size(); ++i)
            adapter.W.data()[i] -= scale * grad.data()[i];
    }
    if (info)
        info->final_loss =
            contrastive_loss_grad(adapter.W, bases, terms, config.tau, nullptr) / denom;
    return adapter;
}

std::vector<std::string> rerank(const Adapter& adapter, const std::string& basic_prompt_text,
                                const std::vector<std::pair<std::string, std::string>>& candidates,
                                int k_s, EmbedProvider& provider) {
    if (candidates.empty()) throw DomainError("empty candidate list");
    if (k_s < 1) throw ConfigError("k_s must be >= 1 for rerank");
    if (basic_prompt_text.empty()) throw DomainError("empty query prompt");

    std::vector<std::string> texts;
    texts.reserve(candidates.size() + 1);
    texts.push_back(basic_prompt_text);
    for (const auto& [id, text] : candidates) texts.push_back(text);
    const auto embedded = provider.embed(texts);
    if (embedded.size() != texts.size())
        throw ProviderError("embedding provider returned wrong count");

    const EmbeddingVector query = adapter_embed(adapter, embedded.front());
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const EmbeddingVector e = adapter_embed(adapter, embedded[i + 1]);
        scored.emplace_back(candidates[i].first, cosine(query, e));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const std::size_t take = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k_s));
    std::vector<std::string> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].first);
    return out;
}

}  // namespace score
