// SPDX-License-Identifier: Apache-2.0
#include "score/car.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "score/io.hpp"

namespace score {

TrainingPairSet build_training_pairs(const Corpus& corpus, const CrmModel& model, int k_c) {
    if (k_c <= 0) throw ConfigError("k_c must be >= 1");
    if (k_c >= static_cast<int>(corpus.n_users()))
        throw ConfigError("k_c must be < number of users");
    const auto embeddings = user_sequence_embeddings(model, corpus);

    TrainingPairSet out;
    for (std::size_t t = 0; t < corpus.n_users(); ++t) {
        if (embeddings[t].empty()) {
            ++out.skipped_anchors;
            continue;
        }
        std::vector<std::pair<int, double>> scored;
        scored.reserve(corpus.n_users());
        for (std::size_t u = 0; u < corpus.n_users(); ++u) {
            if (u == t || embeddings[u].empty()) continue;
            scored.emplace_back(static_cast<int>(u), dot(embeddings[u], embeddings[t]));
        }
        if (scored.empty()) {
            ++out.skipped_anchors;
            continue;
        }
        const std::size_t take =
            std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k_c));
        std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                          [](const auto& a, const auto& b) {
                              if (a.second != b.second) return a.second > b.second;
                              return a.first < b.first;
                          });
        TrainingPair pair;
        pair.anchor = static_cast<int>(t);
        for (std::size_t i = 0; i < take; ++i) pair.positives.push_back(scored[i].first);
        out.entries.push_back(std::move(pair));
    }
    return out;
}

double car_loss(const std::vector<EmbeddingVector>& anchors,
                const std::vector<std::vector<EmbeddingVector>>& positives, double tau) {
    if (anchors.empty()) throw DomainError("empty batch");
    if (anchors.size() != positives.size())
        throw DomainError("anchor/positive list size mismatch");

    // Flatten into a shared vector set: anchors first, then positives.
    std::vector<Vec> embs;
    for (const auto& a : anchors) {
        if (a.zero) throw DomainError("zero anchor embedding");
        embs.push_back(a.values);
    }
    std::vector<std::vector<int>> pos_idx(anchors.size());
    for (std::size_t t = 0; t < positives.size(); ++t) {
        for (const auto& p : positives[t]) {
            if (p.zero) throw DomainError("zero positive embedding");
            pos_idx[t].push_back(static_cast<int>(embs.size()));
            embs.push_back(p.values);
        }
    }
    std::vector<ContrastiveTerm> terms;
    for (std::size_t t = 0; t < anchors.size(); ++t) {
        std::vector<int> negatives;
        for (std::size_t o = 0; o < anchors.size(); ++o) {
            if (o == t) continue;
            negatives.insert(negatives.end(), pos_idx[o].begin(), pos_idx[o].end());
        }
        for (int p : pos_idx[t])
            terms.push_back(ContrastiveTerm{static_cast<int>(t), p, negatives});
    }
    return contrastive_loss(embs, terms, tau);
}

namespace {

/// Unique base embeddings of the behavior texts for a set of users.
/// Returns a user -> slot map plus the base vectors, embedding each text
/// through one batched provider call.
std::unordered_map<int, int> embed_behavior_texts(const Corpus& corpus,
                                                  const std::set<int>& users,
                                                  EmbedProvider& provider, int max_items,
                                                  std::vector<Vec>* bases) {
    std::vector<std::string> texts;
    std::vector<int> order(users.begin(), users.end());
    texts.reserve(order.size());
    for (int u : order) texts.push_back(behavior_text(corpus, u, max_items));
    const auto embedded = provider.embed(texts);
    if (embedded.size() != texts.size())
        throw ProviderError("embedding provider returned wrong count");
    std::unordered_map<int, int> slot;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (embedded[i].zero)
            throw DomainError("zero embedding for behavior text of user " +
                              corpus.user_id(order[i]));
        slot[order[i]] = static_cast<int>(bases->size());
        bases->push_back(embedded[i].values);
    }
    return slot;
}

}  // namespace

Adapter train_car_adapter(const TrainingPairSet& pairs, const Corpus& corpus,
                          EmbedProvider& provider, const CarTrainConfig& config,
                          AdapterTrainInfo* info) {
    if (pairs.entries.empty()) throw DomainError("empty training pair set");
    if (config.tau <= 0) throw ConfigError("tau_car must be > 0");
    if (config.lr < 0) throw ConfigError("car_lr must be >= 0");
    if (config.epochs < 0) throw ConfigError("car_epochs must be >= 0");
    if (config.batch_size <= 0) throw ConfigError("batch_size must be >= 1");

    std::set<int> involved;
    for (const auto& e : pairs.entries) {
        involved.insert(e.anchor);
        involved.insert(e.positives.begin(), e.positives.end());
    }
    std::vector<Vec> bases;
    const auto slot = embed_behavior_texts(corpus, involved, provider, config.max_items, &bases);

    Adapter adapter = make_adapter(provider.dim(), config.tau, config.seed);

    // Batch = a set of entries; for anchor t the negatives are the other
    // anchors' positive slots, minus t's own positive users and t itself.
    auto batch_terms = [&](const std::vector<const TrainingPair*>& batch,
                           std::vector<ContrastiveTerm>* terms, std::size_t* n_terms) {
        terms->clear();
        for (std::size_t t = 0; t < batch.size(); ++t) {
            std::set<int> own(batch[t]->positives.begin(), batch[t]->positives.end());
            own.insert(batch[t]->anchor);
            std::vector<int> negatives;
            for (std::size_t o = 0; o < batch.size(); ++o) {
                if (o == t) continue;
                for (int p : batch[o]->positives)
                    if (!own.count(p)) negatives.push_back(slot.at(p));
            }
            for (int p : batch[t]->positives) {
                terms->push_back(
                    ContrastiveTerm{slot.at(batch[t]->anchor), slot.at(p), negatives});
                ++*n_terms;
            }
        }
    };

    std::vector<std::size_t> order(pairs.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    auto epoch_batches = [&](const std::vector<std::size_t>& ord) {
        std::vector<std::vector<const TrainingPair*>> batches;
        for (std::size_t start = 0; start < ord.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            std::vector<const TrainingPair*> batch;
            const std::size_t end = std::min<std::size_t>(
                ord.size(), start + static_cast<std::size_t>(config.batch_size));
            for (std::size_t i = start; i < end; ++i)
                batch.push_back(&pairs.entries[ord[i]]);
            batches.push_back(std::move(batch));
        }
        return batches;
    };

    auto mean_loss = [&](const Matrix& W) {
        double total = 0.0;
        std::size_t count = 0;
        std::vector<ContrastiveTerm> terms;
        for (const auto& batch : epoch_batches(order)) {
            std::size_t n = 0;
            batch_terms(batch, &terms, &n);
            total += contrastive_loss_grad(W, bases, terms, config.tau, nullptr);
            count += n;
        }
        return count ? total / static_cast<double>(count) : 0.0;
    };

    if (info) {
        info->initial_loss = mean_loss(adapter.W);
        info->instances = pairs.entries.size();
    }

    Rng rng(config.seed);
    const std::size_t dim = adapter.dim();
    Matrix grad(dim, dim);
    std::vector<ContrastiveTerm> terms;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (const auto& batch : epoch_batches(order)) {
            std::size_t n = 0;
            batch_terms(batch, &terms, &n);
            if (n == 0) continue;
            std::fill(grad.data().begin(), grad.data().end(), 0.0);
            contrastive_loss_grad(adapter.W, bases, terms, config.tau, &grad);
            const double scale = config.lr / static_cast<double>(n);
            for (std::size_t i = 0; i < grad.data().size(); ++i)
                adapter.W.data()[i] -= scale * grad.data()[i];
        }
    }
    if (info) info->final_loss = mean_loss(adapter.W);
    return adapter;
}

BehaviorIndex build_behavior_index(const Corpus& corpus, const Adapter& adapter,
                                   EmbedProvider& provider, int max_items) {
    std::vector<int> users;
    for (std::size_t u = 0; u < corpus.n_users(); ++u)
        if (!corpus.positives(static_cast<int>(u)).empty())
            users.push_back(static_cast<int>(u));
    if (users.empty()) throw DomainError("no users with positive history to index");

    std::vector<std::string> ids;
    ids.reserve(users.size());
    std::vector<std::string> texts;
    texts.reserve(users.size());
    for (int u : users) {
        ids.push_back(corpus.user_id(u));
        texts.push_back(behavior_text(corpus, u, max_items));
    }
    // User ids ascend with user index by corpus construction.
    const auto embedded = provider.embed(texts);
    if (embedded.size() != texts.size())
        throw ProviderError("embedding provider returned wrong count");

    BehaviorIndex index;
    index.ids = std::move(ids);
    index.rows = Matrix(users.size(), adapter.dim());
    for (std::size_t i = 0; i < embedded.size(); ++i) {
        const EmbeddingVector projected = adapter_embed(adapter, embedded[i]);
        auto row = index.rows.row(i);
        std::copy(projected.values.begin(), projected.values.end(), row.begin());
    }
    return index;
}

std::vector<std::pair<std::string, double>> retrieve(const BehaviorIndex& index,
                                                     const EmbeddingVector& query, int k_e,
                                                     const std::string& exclude) {
    if (index.ids.empty()) throw DomainError("empty behavior index");
    if (k_e <= 0) throw ConfigError("k_e must be >= 1");
    if (query.zero) throw DomainError("zero query embedding");
    if (query.dim() != index.rows.cols())
        throw DomainError("query dimension mismatch with index");

    const double qn = norm2(query.values);
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(index.ids.size());
    for (std::size_t i = 0; i < index.ids.size(); ++i) {
        if (index.ids[i] == exclude) continue;
        const auto row = index.rows.row(i);
        const double rn = norm2(row);
        if (!(rn > 0.0)) continue;
        scored.emplace_back(index.ids[i], dot(row, query.values) / (rn * qn));
    }
    const std::size_t take = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k_e));
    std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return a.first < b.first;
                      });
    scored.resize(take);
    return scored;
}

namespace {
constexpr char kIndexMagic[4] = {'E', 'M', 'B', '1'};
}

void save_index(const BehaviorIndex& index, const std::filesystem::path& path) {
    ByteWriter w;
    w.bytes({kIndexMagic, 4});
    w.u32(static_cast<std::uint32_t>(index.rows.cols()));
    w.u64(index.ids.size());
    for (const auto& id : index.ids) w.str32(id);
    for (std::size_t r = 0; r < index.rows.rows(); ++r)
        for (double x : index.rows.row(r)) w.f32(static_cast<float>(x));
    atomic_write_file(path, w.buffer());
}

BehaviorIndex load_index(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    ByteReader r(data);
    if (r.bytes(4) != std::string_view(kIndexMagic, 4))
        throw IoError("bad magic in index artifact: " + path.string());
    const std::uint32_t dim = r.u32();
    const std::uint64_t count = r.u64();
    BehaviorIndex index;
    index.ids.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) index.ids.push_back(r.str32());
    index.rows = Matrix(count, dim);
    for (double& x : index.rows.data()) x = r.f32();
    if (!r.at_end()) throw IoError("trailing bytes in index artifact: " + path.string());
    return index;
}

}  // namespace score
