// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cstdlib>
#include <thread>

#include "score/providers.hpp"

#include <httplib.h>
#include <json.hpp>

namespace score {

namespace {

using nlohmann::json;

struct SplitUrl {
    std::string base;    // scheme://host:port
    std::string prefix;  // path prefix, may be empty
};

SplitUrl split_url(const std::string& endpoint) {
    const std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("endpoint must include scheme: " + endpoint);
    const std::size_t slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, slash), prefix};
}

httplib::Headers auth_headers(const RemoteOptions& options) {
    httplib::Headers headers;
    if (!options.api_key_env.empty()) {
        if (const char* key = std::getenv(options.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    return headers;
}

/// POST with bounded retries on transport failures and 5xx responses.
json post_json(const std::string& endpoint, const std::string& path, const json& body,
               const RemoteOptions& options) {
    const SplitUrl url = split_url(endpoint);
    std::string last_error;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
        httplib::Client client(url.base);
        client.set_connection_timeout(options.timeout_seconds, 0);
        client.set_read_timeout(options.timeout_seconds, 0);
        auto res = client.Post(url.prefix + path, auth_headers(options), body.dump(),
                               "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw ProviderError("HTTP " + std::to_string(res->status) + " from " + url.base +
                                url.prefix + path + ": " + res->body);
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw ProviderError("invalid JSON from " + url.base + path + ": " + e.what());
        }
    }
    throw ProviderError(last_error + " calling " + url.base + url.prefix + path);
}

}  // namespace

RemoteEmbedProvider::RemoteEmbedProvider(std::string endpoint, std::size_t expected_dim,
                                         RemoteOptions options)
    : endpoint_(std::move(endpoint)), dim_(expected_dim), options_(std::move(options)) {}

std::vector<EmbeddingVector> RemoteEmbedProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    const json body = {{"texts", texts}};
    const json resp = post_json(endpoint_, "/embed", body, options_);
    if (!resp.contains("vectors") || !resp["vectors"].is_array())
        throw ProviderError("embed response missing 'vectors' array");
    const auto& vectors = resp["vectors"];
    if (vectors.size() != texts.size())
        throw ProviderError("embed count mismatch: sent " + std::to_string(texts.size()) +
                            ", got " + std::to_string(vectors.size()));
    std::vector<EmbeddingVector> out;
    out.reserve(vectors.size());
    std::size_t seen_dim = 0;
    for (const auto& v : vectors) {
        EmbeddingVector e;
        e.values.reserve(v.size());
        for (const auto& x : v) e.values.push_back(x.get<double>());
        if (seen_dim == 0)
            seen_dim = e.values.size();
        else if (e.values.size() != seen_dim)
            throw ProviderError("embed dimension mismatch within batch");
        if (dim_ != 0 && e.values.size() != dim_)
            throw ProviderError("embed dimension mismatch: expected " + std::to_string(dim_) +
                                ", got " + std::to_string(e.values.size()));
        if (!normalize(e.values)) {
            e.values.assign(seen_dim, 0.0);
            e.zero = true;
        }
        out.push_back(std::move(e));
    }
    if (dim_ == 0) dim_ = seen_dim;
    return out;
}

RemoteLlmProvider::RemoteLlmProvider(std::string endpoint, std::string model,
                                     RemoteOptions options)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), options_(std::move(options)) {}

std::string RemoteLlmProvider::complete(const std::string& prompt) {
    if (prompt.empty()) throw DomainError("empty prompt");
    const json body = {{"model", model_},
                       {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    const json resp = post_json(endpoint_, "/chat/completions", body, options_);
    try {
        return resp.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed chat completion response: ") + e.what());
    }
}

namespace {

/// Rank candidate tokens: exact string match beats a leading-whitespace
/// variant; within a class the higher logprob wins.
struct TokenMatch {
    bool found = false;
    bool exact = false;
    double logprob = 0.0;

    void offer(bool is_exact, double lp) {
        if (!found || (is_exact && !exact) || (is_exact == exact && lp > logprob)) {
            found = true;
            exact = exact || is_exact;
            logprob = lp;
        }
    }
};

bool matches_with_leading_ws(const std::string& token, const std::string& target) {
    std::size_t i = 0;
    while (i < token.size() && std::isspace(static_cast<unsigned char>(token[i]))) ++i;
    return token.compare(i, std::string::npos, target) == 0;
}

}  // namespace

JudgeResult RemoteLlmProvider::judge(const std::string& prompt) {
    if (prompt.empty()) throw DomainError("empty prompt");
    const json body = {{"model", model_},
                       {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                       {"max_tokens", 1},
                       {"logprobs", true},
                       {"top_logprobs", 20}};
    const json resp = post_json(endpoint_, "/chat/completions", body, options_);
    TokenMatch yes, no;
    try {
        const auto& top = resp.at("choices").at(0).at("logprobs").at("content").at(0).at(
            "top_logprobs");
        for (const auto& entry : top) {
            const std::string token = entry.at("token").get<std::string>();
            const double lp = entry.at("logprob").get<double>();
            if (token == "Yes")
                yes.offer(true, lp);
            else if (matches_with_leading_ws(token, "Yes"))
                yes.offer(false, lp);
            if (token == "No")
                no.offer(true, lp);
            else if (matches_with_leading_ws(token, "No"))
                no.offer(false, lp);
        }
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed logprobs response: ") + e.what());
    }
    if (!yes.found || !no.found)
        throw ProviderError(std::string("missing candidate token in top-logprobs: ") +
                            (!yes.found ? "'Yes'" : "'No'"));
    return JudgeResult{yes.logprob, no.logprob};
}

}  // namespace score
