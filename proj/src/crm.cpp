// SPDX-License-Identifier: Apache-2.0
#include "score/crm.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "score/io.hpp"

namespace score {

namespace {
constexpr char kMagic[4] = {'C', 'R', 'M', '1'};
}

CrmModel::CrmModel(Matrix user_factors, Matrix item_factors, std::uint64_t seed, CrmMode mode)
    : user_factors_(std::move(user_factors)),
      item_factors_(std::move(item_factors)),
      seed_(seed),
      mode_(mode) {
    if (user_factors_.cols() != item_factors_.cols())
        throw DomainError("factor dimension mismatch between user and item matrices");
    if (!user_factors_.all_finite() || !item_factors_.all_finite())
        throw DomainError("non-finite factor entries");
}

double CrmModel::predict(int user, int item) const {
    return dot(user_factors_.row(user), item_factors_.row(item));
}

Vec CrmModel::sequence_embedding(std::span<const int> history, int user) const {
    if (mode_ == CrmMode::UserFactor) {
        if (user < 0 || user >= static_cast<int>(n_users()))
            throw DomainError("unknown user index " + std::to_string(user));
        const auto row = user_factors_.row(user);
        return Vec(row.begin(), row.end());
    }
    if (history.empty()) throw DomainError("empty history: mean-of-items needs >= 1 item");
    Vec out(user_factors_.cols(), 0.0);
    for (int item : history) {
        if (item < 0 || item >= static_cast<int>(n_items()))
            throw DomainError("unknown item index " + std::to_string(item));
        const auto row = item_factors_.row(item);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
    }
    for (double& x : out) x /= static_cast<double>(history.size());
    return out;
}

double bpr_pair_loss(double margin) {
    // softplus(-margin) = -ln sigmoid(margin)
    if (margin > 0) return std::log1p(std::exp(-margin));
    return -margin + std::log1p(std::exp(margin));
}

BprGrads bpr_gradients(std::span<const double> user_row, std::span<const double> pos_row,
                       std::span<const double> neg_row) {
    const std::size_t d = user_row.size();
    const double margin = dot(user_row, pos_row) - dot(user_row, neg_row);
    // d(-ln sigmoid(x))/dx = -(1 - sigmoid(x)) = -sigmoid(-x)
    const double coeff = -1.0 / (1.0 + std::exp(margin));
    BprGrads g{Vec(d), Vec(d), Vec(d)};
    for (std::size_t k = 0; k < d; ++k) {
        g.user[k] = coeff * (pos_row[k] - neg_row[k]);
        g.pos[k] = coeff * user_row[k];
        g.neg[k] = -coeff * user_row[k];
    }
    return g;
}

CrmModel train_bpr_mf(const std::vector<Interaction>& train, std::size_t n_users,
                      std::size_t n_items, const CrmConfig& config,
                      std::vector<double>* epoch_losses) {
    if (config.d <= 0) throw ConfigError("d must be >= 1");
    if (config.lr <= 0) throw ConfigError("lr must be > 0");
    if (config.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (config.l2 < 0) throw ConfigError("l2 must be >= 0");
    if (train.empty()) throw DomainError("empty training set");
    if (n_users == 0 || n_items == 0) throw DomainError("empty user or item table");

    Rng rng(config.seed);
    const double scale = 0.1 / std::sqrt(static_cast<double>(config.d));
    Matrix user_factors(n_users, config.d);
    Matrix item_factors(n_items, config.d);
    for (double& x : user_factors.data()) x = rng.uniform(-scale, scale);
    for (double& x : item_factors.data()) x = rng.uniform(-scale, scale);

    std::vector<std::unordered_set<int>> positive_sets(n_users);
    std::vector<std::pair<int, int>> samples;
    for (const Interaction& rec : train) {
        if (rec.label != 1) continue;
        if (rec.user < 0 || rec.user >= static_cast<int>(n_users) || rec.item < 0 ||
            rec.item >= static_cast<int>(n_items))
            throw DomainError("interaction index out of range");
        positive_sets[rec.user].insert(rec.item);
        samples.emplace_back(rec.user, rec.item);
    }
    if (samples.empty()) throw DomainError("no positive interactions in training set");

    const std::size_t d = static_cast<std::size_t>(config.d);
    Vec user_copy(d), pos_copy(d);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(samples);
        double loss_sum = 0.0;
        std::size_t count = 0;
        for (const auto& [u, i] : samples) {
            const auto& positives = positive_sets[u];
            if (positives.size() >= n_items) continue;  // nothing left to contrast
            int j;
            do {
                j = static_cast<int>(rng.uniform_index(n_items));
            } while (positives.count(j));

            auto pu = user_factors.row(u);
            auto qi = item_factors.row(i);
            auto qj = item_factors.row(j);
            const double margin = dot(pu, qi) - dot(pu, qj);
            loss_sum += bpr_pair_loss(margin);
            ++count;

            const double s = 1.0 / (1.0 + std::exp(margin));  // sigmoid(-margin)
            std::copy(pu.begin(), pu.end(), user_copy.begin());
            std::copy(qi.begin(), qi.end(), pos_copy.begin());
            for (std::size_t k = 0; k < d; ++k) {
                const double w = user_copy[k];
                pu[k] += config.lr * (s * (pos_copy[k] - qj[k]) - config.l2 * w);
                qi[k] += config.lr * (s * w - config.l2 * qi[k]);
                qj[k] += config.lr * (-s * w - config.l2 * qj[k]);
            }
        }
        if (epoch_losses)
            epoch_losses->push_back(count ? loss_sum / static_cast<double>(count) : 0.0);
    }
    return CrmModel(std::move(user_factors), std::move(item_factors), config.seed, config.mode);
}

std::vector<Vec> user_sequence_embeddings(const CrmModel& model, const Corpus& corpus) {
    std::vector<Vec> out(corpus.n_users());
    for (std::size_t u = 0; u < corpus.n_users(); ++u) {
        if (model.mode() == CrmMode::MeanOfItems) {
            const auto& pos = corpus.positives(static_cast<int>(u));
            if (pos.empty()) continue;  // no embedding for this user
            out[u] = model.sequence_embedding(pos, static_cast<int>(u));
        } else {
            out[u] =
                model.sequence_embedding({}, static_cast<int>(u));
        }
    }
    return out;
}

NeighborList top_k_collaborative(const CrmModel& model, const Corpus& corpus, int target,
                                 int k) {
    if (k <= 0) throw ConfigError("k must be >= 1");
    if (target < 0 || target >= static_cast<int>(corpus.n_users()))
        throw DomainError("unknown user index " + std::to_string(target));
    const auto embeddings = user_sequence_embeddings(model, corpus);
    if (embeddings[target].empty())
        throw DomainError("target user " + corpus.user_id(target) +
                          " has no collaborative embedding (empty positive history)");

    std::vector<std::pair<int, double>> scored;
    scored.reserve(corpus.n_users());
    for (std::size_t u = 0; u < corpus.n_users(); ++u) {
        if (static_cast<int>(u) == target || embeddings[u].empty()) continue;
        scored.emplace_back(static_cast<int>(u), dot(embeddings[u], embeddings[target]));
    }
    if (scored.empty()) throw DomainError("empty neighborhood: no other embeddable users");

    const std::size_t take = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k));
    std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return a.first < b.first;
                      });
    scored.resize(take);
    return NeighborList{target, std::move(scored)};
}

void CrmModel::save(const std::filesystem::path& path) const {
    ByteWriter w;
    w.bytes({kMagic, 4});
    w.u32(static_cast<std::uint32_t>(dim()));
    w.u64(n_users());
    w.u64(n_items());
    for (std::size_t r = 0; r < user_factors_.rows(); ++r)
        for (double x : user_factors_.row(r)) w.f32(static_cast<float>(x));
    for (std::size_t r = 0; r < item_factors_.rows(); ++r)
        for (double x : item_factors_.row(r)) w.f32(static_cast<float>(x));
    atomic_write_file(path, w.buffer());
}

CrmModel CrmModel::load(const std::filesystem::path& path, std::uint64_t seed, CrmMode mode) {
    const std::string data = read_file(path);
    ByteReader r(data);
    if (r.bytes(4) != std::string_view(kMagic, 4))
        throw IoError("bad magic in model artifact: " + path.string());
    const std::uint32_t d = r.u32();
    const std::uint64_t nu = r.u64();
    const std::uint64_t nv = r.u64();
    if (d == 0) throw IoError("zero dimension in model artifact: " + path.string());
    Matrix user_factors(nu, d);
    Matrix item_factors(nv, d);
    for (double& x : user_factors.data()) x = r.f32();
    for (double& x : item_factors.data()) x = r.f32();
    if (!r.at_end()) throw IoError("trailing bytes in model artifact: " + path.string());
    return CrmModel(std::move(user_factors), std::move(item_factors), seed, mode);
}

}  // namespace score
