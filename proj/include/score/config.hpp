// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "score/common.hpp"
#include "score/crm.hpp"

namespace score {

/// Flat key-value store parsed from a sectioned config file (TOML subset:
/// [section] headers, string / integer / float / boolean values, #
/// comments). Keys are "section.key"; keys before any section are bare.
class KvConfig {
public:
    static KvConfig parse_file(const std::filesystem::path& path);
    static KvConfig parse_string(const std::string& text, const std::string& origin = "config");

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::optional<std::int64_t> get_optional_int(const std::string& key) const;

    /// Sorted key=value lines; input to the config digest.
    std::string canonical() const;

private:
    std::map<std::string, std::string> values_;
};

enum class ProviderKind { Stub, Remote };

/// Effective run settings: paths, provider selection, hyperparameters.
struct RunConfig {
    // paths
    std::string interactions;
    std::string metadata;
    std::string workdir = "out";
    std::string report;

    // provider
    ProviderKind provider = ProviderKind::Stub;
    std::string embed_endpoint;
    std::string llm_endpoint;
    std::string llm_model;
    int concurrency = 4;

    // corpus
    int binarize_threshold = 4;
    std::optional<std::int64_t> window_start;
    int min_interactions = 0;
    int max_items = 15;

    // split
    std::optional<std::int64_t> train_end;
    std::optional<std::int64_t> val_end;

    // crm
    int d = 64;
    int crm_epochs = 30;
    double crm_lr = 0.05;
    double crm_l2 = 1e-4;
    CrmMode crm_mode = CrmMode::MeanOfItems;

    // car
    int k_c = 5;
    double tau_car = 0.1;
    int car_epochs = 50;
    double car_lr = 0.1;
    int batch_size = 16;

    // sare
    double tau_sare = 0.02;
    int sare_epochs = 50;
    double sare_lr = 0.002;
    int rank_threshold = 5;
    int neg_count = 3;
    int assess_sample = 10000;

    // retrieval + embedding
    int k_e = 10;
    int k_s = 2;
    int embed_dim = 256;

    std::uint64_t seed = 42;

    static RunConfig from(const KvConfig& kv);
    /// Throws ConfigError naming the offending key.
    void validate() const;
    /// FNV-1a hex digest over the canonical field listing.
    std::string digest() const;
};

}  // namespace score
