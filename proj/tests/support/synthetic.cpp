// SPDX-License-Identifier: Apache-2.0
#include "support/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "score/io.hpp"
#include "support/oracles.hpp"

namespace score::testing {

namespace {

std::string pad2(int n) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", n);
    return buf;
}

/// Seeded sample of k distinct values from [0, n).
std::vector<int> sample_k(Rng& rng, int n, int k) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    rng.shuffle(all);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

void RawDataset::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::string items_tsv;
    for (const ItemMeta& item : items) {
        items_tsv += item.item_id + "\t" + item.title + "\t";
        for (std::size_t i = 0; i < item.tags.size(); ++i) {
            if (i) items_tsv += '|';
            items_tsv += item.tags[i];
        }
        items_tsv += '\n';
    }
    atomic_write_file(dir / "items.tsv", items_tsv);

    std::string inter_tsv;
    for (const InteractionRecord& rec : interactions) {
        inter_tsv += rec.user_id + "\t" + rec.item_id + "\t" + std::to_string(rec.rating) +
                     "\t" + std::to_string(rec.timestamp) + "\n";
    }
    atomic_write_file(dir / "interactions.tsv", inter_tsv);
}

Corpus RawDataset::to_corpus(int binarize_threshold) const {
    TempDir tmp;
    write(tmp.path());
    IngestOptions opts;
    opts.binarize_threshold = binarize_threshold;
    return ingest(tmp.path() / "interactions.tsv", tmp.path() / "items.tsv", opts);
}

SplitSpec synthetic_split() { return SplitSpec{2000, 2500}; }

// ---------------------------------------------------------------------------
// Two-block dataset
// ---------------------------------------------------------------------------

int two_block_group(const std::string& user_id) { return std::stoi(user_id.substr(1)) / 25; }

RawDataset make_two_block(std::uint64_t seed) {
    RawDataset data;
    const int users_per_group = 25;
    const int items_per_group = 20;
    for (int g = 0; g < 2; ++g) {
        const char prefix = g == 0 ? 'a' : 'b';
        for (int i = 0; i < items_per_group; ++i) {
            ItemMeta item;
            item.item_id = std::string(1, prefix) + pad2(i);
            item.title = std::string(g == 0 ? "Alpha" : "Beta") + " Feature " + pad2(i) +
                         " (199" + std::to_string(i % 10) + ")";
            item.tags = {g == 0 ? "Alpha" : "Beta"};
            data.items.push_back(std::move(item));
        }
    }
    // Balanced cyclic assignment: every item gets near-uniform coverage, so
    // the planted blocks separate regardless of the training seed. The seed
    // only shifts the cyclic phase.
    const int phase = static_cast<int>(seed % 7);
    for (int u = 0; u < 2 * users_per_group; ++u) {
        const int g = u / users_per_group;
        const char own = g == 0 ? 'a' : 'b';
        const char other = g == 0 ? 'b' : 'a';
        const std::string uid = "u" + pad2(u);
        const int base = (u % users_per_group + phase) % items_per_group;

        std::int64_t ts = 1000;
        for (int k = 0; k < 12; ++k)  // train positives
            data.interactions.push_back(
                {uid, std::string(1, own) + pad2((base + k) % items_per_group), 5, ts++});
        for (int k = 0; k < 4; ++k)  // train negatives
            data.interactions.push_back(
                {uid, std::string(1, other) + pad2((base + 7 * k) % items_per_group), 1, ts++});
        ts = 3000;
        for (int k = 12; k < 14; ++k)  // held-out positives
            data.interactions.push_back(
                {uid, std::string(1, own) + pad2((base + k) % items_per_group), 5, ts++});
        for (int k = 4; k < 6; ++k)  // held-out negatives
            data.interactions.push_back(
                {uid, std::string(1, other) + pad2((base + 7 * k) % items_per_group), 1, ts++});
    }
    return data;
}

// ---------------------------------------------------------------------------
// Planted-cluster dataset
// ---------------------------------------------------------------------------

int planted_cluster_of(const std::string& user_id) {
    return std::stoi(user_id.substr(1)) / 6;
}

RawDataset make_planted_cluster(std::uint64_t seed) {
    RawDataset data;
    const int n_users = 60;
    const int clusters = 10;
    const int cluster_items = 6;

    for (int k = 0; k < clusters; ++k) {
        for (int j = 0; j < cluster_items; ++j) {
            ItemMeta item;
            item.item_id = "c" + std::to_string(k) + "i" + std::to_string(j);
            item.title = "Arc" + std::to_string(k) + " Tale" + std::to_string(k) + "x" +
                         std::to_string(j);
            item.tags = {"Arc" + std::to_string(k)};
            data.items.push_back(std::move(item));
        }
    }
    for (int u = 0; u < n_users; ++u) {
        const int g = u % 6;  // decoy group
        for (int j = 0; j < 4; ++j) {
            ItemMeta item;
            item.item_id = "d" + pad2(u) + "i" + std::to_string(j);
            item.title = "Mark" + std::to_string(g) + " Glyph" + std::to_string(g) + "a Glyph" +
                         std::to_string(g) + "b Solo" + pad2(u) + "x" + std::to_string(j);
            item.tags = {"Mark" + std::to_string(g)};
            data.items.push_back(std::move(item));
        }
    }

    Rng rng(seed);
    for (int u = 0; u < n_users; ++u) {
        const int cluster = u / 6;
        const std::string uid = "u" + pad2(u);
        const auto picks = sample_k(rng, cluster_items, 5);
        std::int64_t ts = 1000;
        for (int j : picks)
            data.interactions.push_back(
                {uid, "c" + std::to_string(cluster) + "i" + std::to_string(j), 5, ts++});
        for (int j = 0; j < 4; ++j)
            data.interactions.push_back({uid, "d" + pad2(u) + "i" + std::to_string(j), 5, ts++});
    }
    return data;
}

// ---------------------------------------------------------------------------
// Planted-signal dataset
// ---------------------------------------------------------------------------

bool planted_signal_is_probe(const std::string& user_id) {
    return user_id.size() >= 3 && user_id[2] == 'p';
}

int planted_signal_group(const std::string& user_id) { return user_id[1] - '0'; }

RawDataset make_planted_signal(std::uint64_t seed) {
    RawDataset data;
    const int groups = 6;
    const int seeds_per_group = 5;
    const int probes_per_group = 3;

    for (int g = 0; g < groups; ++g) {
        const std::string gs = std::to_string(g);
        for (int j = 0; j < 5; ++j) {
            ItemMeta item;
            item.item_id = "g" + gs + "c" + std::to_string(j);
            item.title = "Port" + gs + " Cross" + gs + "x" + std::to_string(j);
            item.tags = {"Common"};
            data.items.push_back(std::move(item));
        }
        for (int j = 0; j < 4; ++j) {
            ItemMeta item;
            item.item_id = "g" + gs + "s" + std::to_string(j);
            item.title = "Sig" + gs + " Beacon" + gs + "x" + std::to_string(j);
            item.tags = {"Sig" + gs};
            data.items.push_back(std::move(item));
        }
        for (int k = 0; k < probes_per_group; ++k) {
            for (int j = 0; j < 2; ++j) {
                ItemMeta item;
                item.item_id = "f" + gs + "p" + std::to_string(k) + "x" + std::to_string(j);
                item.title = "Solo" + gs + "p" + std::to_string(k) + " Note" + gs + "p" +
                             std::to_string(k) + "x" + std::to_string(j);
                item.tags = {"Common"};
                data.items.push_back(std::move(item));
            }
        }
        for (int i = 0; i < 2; ++i) {
            ItemMeta item;
            item.item_id = "t" + gs + "pos" + std::to_string(i);
            item.title = "Sig" + gs + " Nova" + gs + "x" + std::to_string(i);
            item.tags = {"Sig" + gs};
            data.items.push_back(std::move(item));
        }
        for (int k = 0; k < probes_per_group; ++k) {
            for (int i = 0; i < 2; ++i) {
                const std::string suffix = gs + "x" + std::to_string(k) + std::to_string(i);
                ItemMeta item;
                item.item_id = "t" + gs + "neg" + std::to_string(k) + "x" + std::to_string(i);
                item.title = "Cold" + suffix + " Void" + suffix;
                item.tags = {"Cold" + suffix};
                data.items.push_back(std::move(item));
            }
        }
    }

    Rng rng(seed);
    for (int g = 0; g < groups; ++g) {
        const std::string gs = std::to_string(g);
        for (int s = 0; s < seeds_per_group; ++s) {
            const std::string uid = "u" + gs + "s" + std::to_string(s);
            std::int64_t ts = 1000;
            for (int j : sample_k(rng, 5, 4))
                data.interactions.push_back({uid, "g" + gs + "c" + std::to_string(j), 5, ts++});
            for (int j : sample_k(rng, 4, 3))
                data.interactions.push_back({uid, "g" + gs + "s" + std::to_string(j), 5, ts++});
        }
        for (int p = 0; p < probes_per_group; ++p) {
            const std::string uid = "u" + gs + "p" + std::to_string(p);
            const auto connectors = sample_k(rng, 5, 4);  // 3 in train, 1 in val
            std::int64_t ts = 1000;
            for (int k = 0; k < 3; ++k)
                data.interactions.push_back(
                    {uid, "g" + gs + "c" + std::to_string(connectors[k]), 5, ts++});
            for (int j = 0; j < 2; ++j)
                data.interactions.push_back(
                    {uid, "f" + gs + "p" + std::to_string(p) + "x" + std::to_string(j), 5,
                     ts++});
            data.interactions.push_back(
                {uid, "g" + gs + "c" + std::to_string(connectors[3]), 5, 2200});
            ts = 2600;
            for (int i = 0; i < 2; ++i)
                data.interactions.push_back({uid, "t" + gs + "pos" + std::to_string(i), 5, ts++});
            for (int i = 0; i < 2; ++i)
                data.interactions.push_back(
                    {uid, "t" + gs + "neg" + std::to_string(p) + "x" + std::to_string(i), 1,
                     ts++});
        }
    }
    return data;
}

}  // namespace score::testing
