// SPDX-License-Identifier: Apache-2.0
#include "score/providers.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <thread>

namespace score {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.zero || b.zero) throw DomainError("cosine undefined for zero vector");
    if (a.dim() != b.dim())
        throw DomainError("cosine dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
    const double na = norm2(a.values);
    const double nb = norm2(b.values);
    if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("cosine undefined for zero vector");
    return dot(a.values, b.values) / (na * nb);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dim) {
    if (dim < 2) throw ConfigError("embed_dim must be >= 2");
    EmbeddingVector out;
    out.values.assign(dim, 0.0);
    std::string token;
    bool any = false;
    auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t h = fnv1a64(token);
        const std::size_t bucket = static_cast<std::size_t>(h % dim);
        out.values[bucket] += (h >> 63) == 0 ? 1.0 : -1.0;
        any = true;
        token.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    if (!any || !normalize(out.values)) {
        out.values.assign(dim, 0.0);
        out.zero = true;
    }
    return out;
}

std::vector<EmbeddingVector> HashEmbedProvider::embed(const std::vector<std::string>& texts) {
    calls_.fetch_add(1);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hash_embed(t, dim_));
    return out;
}

// ---------------------------------------------------------------------------
// Stub LLM
// ---------------------------------------------------------------------------

namespace {

/// Spans between paired single quotes, in order of appearance.
std::vector<std::string> quoted_spans(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t open = text.find('\'', pos);
        if (open == std::string::npos) break;
        const std::size_t close = text.find('\'', open + 1);
        if (close == std::string::npos) break;
        out.push_back(text.substr(open + 1, close - open - 1));
        pos = close + 1;
    }
    return out;
}

constexpr const char* kTargetAnchor = "the movie titled ";

}  // namespace

StubLlmProvider::StubLlmProvider(
    std::unordered_map<std::string, std::vector<std::string>> tags_by_title)
    : tags_by_title_(std::move(tags_by_title)) {}

std::unordered_map<std::string, std::vector<std::string>> StubLlmProvider::title_tags(
    const Corpus& corpus) {
    std::unordered_map<std::string, std::vector<std::string>> map;
    for (const ItemMeta& item : corpus.items()) map[item.title] = item.tags;
    return map;
}

StubLlmProvider StubLlmProvider::from_corpus(const Corpus& corpus) {
    return StubLlmProvider(title_tags(corpus));
}

std::string StubLlmProvider::complete(const std::string& prompt) {
    if (prompt.empty()) throw DomainError("empty prompt");
    complete_calls_.fetch_add(1);
    std::set<std::string> tags;
    for (const auto& span : quoted_spans(prompt)) {
        auto it = tags_by_title_.find(span);
        if (it == tags_by_title_.end()) continue;
        tags.insert(it->second.begin(), it->second.end());
    }
    std::string out = "Helpful signals include: ";
    if (tags.empty()) {
        out += "none";
        return out;
    }
    bool first = true;
    for (const auto& t : tags) {
        if (!first) out += ", ";
        out += t;
        first = false;
    }
    return out;
}

double StubLlmProvider::prompt_jaccard(const std::string& prompt) const {
    // Target title: quoted span following the last "the movie titled ".
    // Mentions: every resolvable quoted span before that anchor (history
    // plus CI behaviors); trailing 'Yes'/'No' never resolve to titles.
    const std::size_t anchor = prompt.rfind(kTargetAnchor);
    std::set<std::string> target_tags;
    std::set<std::string> mention_tags;
    const std::string head =
        anchor == std::string::npos ? prompt : prompt.substr(0, anchor);
    for (const auto& span : quoted_spans(head)) {
        auto it = tags_by_title_.find(span);
        if (it != tags_by_title_.end()) mention_tags.insert(it->second.begin(), it->second.end());
    }
    if (anchor != std::string::npos) {
        const auto tail_spans = quoted_spans(prompt.substr(anchor));
        if (!tail_spans.empty()) {
            auto it = tags_by_title_.find(tail_spans.front());
            if (it != tags_by_title_.end())
                target_tags.insert(it->second.begin(), it->second.end());
        }
    }
    std::size_t inter = 0;
    for (const auto& t : target_tags)
        if (mention_tags.count(t)) ++inter;
    const std::size_t uni = target_tags.size() + mention_tags.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

JudgeResult StubLlmProvider::judge(const std::string& prompt) {
    if (prompt.empty()) throw DomainError("empty prompt");
    judge_calls_.fetch_add(1);
    const double j = prompt_jaccard(prompt);
    return JudgeResult{4.0 * j, 4.0 * (1.0 - j)};
}

}  // namespace score
