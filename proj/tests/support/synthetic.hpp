// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic datasets with planted structure. Collaborative groups,
// text clusters and predictive tags are chosen so each pipeline stage has
// a verifiable signal to recover.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "score/corpus.hpp"

namespace score::testing {

struct RawDataset {
    std::vector<ItemMeta> items;
    std::vector<InteractionRecord> interactions;

    void write(const std::filesystem::path& dir) const;
    Corpus to_corpus(int binarize_threshold = 4) const;
};

/// Boundaries shared by all synthetic datasets: train <= 2000,
/// val <= 2500, test after.
SplitSpec synthetic_split();

/// Two user groups x two item groups; positives live inside the block.
/// 50 users ("u00".."u49", group = number / 25), 40 items ("a.." / "b..").
/// Item assignment is a balanced cyclic design (the seed shifts the
/// phase), so block recovery is stable across training seeds. Train
/// window holds 12 positives + 4 negatives per user, the test window
/// 2 positives + 2 cross-group negatives.
RawDataset make_two_block(std::uint64_t seed);

/// 60 users in 10 collaborative clusters of 6 (shared cluster items) and
/// 6 textual decoy groups of 10 (heavy shared tokens through per-user
/// decoy items). Collaborative neighbors are cluster-mates; raw text
/// similarity points at decoy-mates instead, so the retriever adapter has
/// something real to learn.
RawDataset make_planted_cluster(std::uint64_t seed);

/// 6 groups of 5 "seed" + 3 "probe" users tied by shared connector items.
/// Seeds also hold signal items whose tag predicts the probes' positive
/// test items; probes' own histories never carry that tag. Probe test
/// pairs: 2 positives tagged with the group signal, 2 negatives with cold
/// tags nobody interacted with.
RawDataset make_planted_signal(std::uint64_t seed);

/// Group/cluster recovery from synthetic user ids.
int two_block_group(const std::string& user_id);
int planted_cluster_of(const std::string& user_id);
bool planted_signal_is_probe(const std::string& user_id);
int planted_signal_group(const std::string& user_id);

}  // namespace score::testing
