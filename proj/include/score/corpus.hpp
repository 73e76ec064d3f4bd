// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "score/common.hpp"

namespace score {

struct InteractionRecord {
    std::string user_id;
    std::string item_id;
    int rating = 0;  // 1..5
    std::int64_t timestamp = 0;
};

struct ItemMeta {
    std::string item_id;
    std::string title;
    std::vector<std::string> tags;  // deduplicated, input order
};

struct IngestOptions {
    int binarize_threshold = 4;  // rating >= threshold -> label 1
    std::optional<std::int64_t> window_start;
    int min_interactions = 0;  // drop users with fewer records (0 = keep all)
};

/// Immutable interaction corpus: dense user/item tables plus per-user
/// chronological sequences. The positives-only view backs behavior texts
/// and collaborative embeddings.
class Corpus {
public:
    struct SeqEntry {
        int item;
        int label;  // 0/1
        std::int64_t timestamp;
    };

    Corpus(std::vector<std::string> user_ids, std::vector<ItemMeta> items,
           std::vector<std::vector<SeqEntry>> sequences, int binarize_threshold);

    std::size_t n_users() const { return user_ids_.size(); }
    std::size_t n_items() const { return items_.size(); }
    std::size_t n_interactions() const { return n_interactions_; }

    const std::string& user_id(int u) const { return user_ids_.at(u); }
    const ItemMeta& item(int v) const { return items_.at(v); }
    const std::vector<ItemMeta>& items() const { return items_; }

    std::optional<int> user_index(const std::string& id) const;
    std::optional<int> item_index(const std::string& id) const;

    const std::vector<SeqEntry>& sequence(int u) const { return sequences_.at(u); }

    /// H(u): item indices with label 1, chronological.
    const std::vector<int>& positives(int u) const { return positives_.at(u); }

    int binarize_threshold() const { return binarize_threshold_; }

    /// Same user/item tables, sequences truncated to timestamp <= max_ts.
    Corpus restricted(std::int64_t max_ts) const;

    /// Canonical on-disk form (interactions.tsv + items.tsv + corpus.meta);
    /// loading goes back through ingest, so sequences and labels round-trip.
    void save(const std::filesystem::path& dir) const;
    static Corpus load(const std::filesystem::path& dir);

private:
    std::vector<std::string> user_ids_;
    std::vector<ItemMeta> items_;
    std::unordered_map<std::string, int> user_index_;
    std::unordered_map<std::string, int> item_index_;
    std::vector<std::vector<SeqEntry>> sequences_;
    std::vector<std::vector<int>> positives_;
    std::size_t n_interactions_ = 0;
    int binarize_threshold_ = 4;
};

Corpus ingest(const std::filesystem::path& interactions_path,
              const std::filesystem::path& metadata_path, const IngestOptions& options);

/// Natural-language rendering of the most recent `max_items` positive
/// items: comma-separated single-quoted titles, oldest first.
std::string behavior_text(const Corpus& corpus, int user, int max_items);

/// Single-quoted item title.
std::string item_text(const ItemMeta& item);

struct SplitSpec {
    std::int64_t train_end = 0;
    std::int64_t val_end = 0;
};

struct Interaction {
    int user;
    int item;
    int label;
    std::int64_t timestamp;
};

struct Splits {
    std::vector<Interaction> train;
    std::vector<Interaction> val;
    std::vector<Interaction> test;
};

/// t <= train_end -> train; train_end < t <= val_end -> val; else test.
/// Empty partitions warn on stderr but are not errors.
Splits temporal_split(const Corpus& corpus, const SplitSpec& spec);

/// Interaction-set files: TSV user_id, item_id, label, timestamp.
void save_pairs(const std::filesystem::path& path, const Corpus& corpus,
                const std::vector<Interaction>& pairs);
std::vector<Interaction> load_pairs(const std::filesystem::path& path, const Corpus& corpus);

}  // namespace score
