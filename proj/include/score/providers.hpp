// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "score/corpus.hpp"
#include "score/linalg.hpp"

namespace score {

/// Unit-norm embedding, or an all-zero vector flagged `zero` (no tokens).
struct EmbeddingVector {
    Vec values;
    bool zero = false;

    std::size_t dim() const { return values.size(); }
};

struct JudgeResult {
    double logit_yes = 0.0;
    double logit_no = 0.0;
};

/// Standard cosine similarity; throws DomainError on zero-flagged vectors
/// or mismatched dimensions.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Deterministic bag-of-tokens embedding. Tokens are lowercased maximal
/// ASCII alphanumeric runs; each token is hashed with 64-bit FNV-1a, lands
/// in bucket hash % dim with sign +1 when bit 63 is clear, and the
/// accumulated vector is L2-normalized. No tokens -> zero vector.
EmbeddingVector hash_embed(std::string_view text, std::size_t dim);

std::uint64_t fnv1a64(std::string_view data);

class EmbedProvider {
public:
    virtual ~EmbedProvider() = default;
    /// One vector per input text, order-preserving.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dim() const = 0;
};

class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    /// Next-token logits for "Yes" and "No".
    virtual JudgeResult judge(const std::string& prompt) = 0;
};

/// Offline embedder backed by hash_embed. Pure and thread-safe.
class HashEmbedProvider : public EmbedProvider {
public:
    explicit HashEmbedProvider(std::size_t dim) : dim_(dim) {
        if (dim < 2) throw ConfigError("embed_dim must be >= 2");
    }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return dim_; }

    long calls() const { return calls_.load(); }

private:
    std::size_t dim_;
    std::atomic<long> calls_{0};
};

/// Offline LLM stand-in driven by item tags. Assessments list the sorted
/// tag union of every known title quoted in the prompt; judging scores the
/// tag Jaccard between the target item and the mentioned items.
class StubLlmProvider : public LlmProvider {
public:
    explicit StubLlmProvider(std::unordered_map<std::string, std::vector<std::string>>
                                 tags_by_title);
    static StubLlmProvider from_corpus(const Corpus& corpus);
    static std::unordered_map<std::string, std::vector<std::string>> title_tags(
        const Corpus& corpus);

    std::string complete(const std::string& prompt) override;
    JudgeResult judge(const std::string& prompt) override;

    long complete_calls() const { return complete_calls_.load(); }
    long judge_calls() const { return judge_calls_.load(); }

    /// Tag Jaccard between target tags and the union of mentioned tags, as
    /// used by judge(). Exposed for tests.
    double prompt_jaccard(const std::string& prompt) const;

private:
    std::unordered_map<std::string, std::vector<std::string>> tags_by_title_;
    std::atomic<long> complete_calls_{0};
    std::atomic<long> judge_calls_{0};
};

struct RemoteOptions {
    std::string api_key_env = "SCORE_API_KEY";
    int retries = 2;
    int timeout_seconds = 60;
};

/// POST {endpoint}/embed with {"texts":[...]}; expects {"vectors":[[...]]}.
/// Vectors are L2-normalized client-side.
class RemoteEmbedProvider : public EmbedProvider {
public:
    RemoteEmbedProvider(std::string endpoint, std::size_t expected_dim,
                        RemoteOptions options = {});
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return dim_; }

private:
    std::string endpoint_;
    std::size_t dim_;
    RemoteOptions options_;
};

/// Chat-completion-style client. judge() requests a single output token
/// with top-logprobs and reads the entries for "Yes" and "No" (exact
/// match preferred, leading-whitespace variants accepted).
class RemoteLlmProvider : public LlmProvider {
public:
    RemoteLlmProvider(std::string endpoint, std::string model, RemoteOptions options = {});
    std::string complete(const std::string& prompt) override;
    JudgeResult judge(const std::string& prompt) override;

private:
    std::string endpoint_;
    std::string model_;
    RemoteOptions options_;
};

}  // namespace score
