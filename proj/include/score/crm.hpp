// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "score/corpus.hpp"
#include "score/linalg.hpp"

namespace score {

enum class CrmMode { MeanOfItems, UserFactor };

struct CrmConfig {
    int d = 64;
    int epochs = 30;
    double lr = 0.05;
    double l2 = 1e-4;
    std::uint64_t seed = 42;
    CrmMode mode = CrmMode::MeanOfItems;
};

/// BPR-trained latent factor model producing collaborative sequence
/// embeddings. Any backbone exposing sequence_embedding() can stand in;
/// this is the dependency-free default.
class CrmModel {
public:
    CrmModel(Matrix user_factors, Matrix item_factors, std::uint64_t seed, CrmMode mode);

    int dim() const { return static_cast<int>(user_factors_.cols()); }
    std::size_t n_users() const { return user_factors_.rows(); }
    std::size_t n_items() const { return item_factors_.rows(); }
    CrmMode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }

    const Matrix& user_factors() const { return user_factors_; }
    const Matrix& item_factors() const { return item_factors_; }

    /// Pairwise preference score x_uv.
    double predict(int user, int item) const;

    /// Collaborative embedding of an interaction history. Mean-of-items
    /// averages item factor rows; user-factor returns the user's own row
    /// (history used only for the user lookup there).
    Vec sequence_embedding(std::span<const int> history, int user = -1) const;

    void save(const std::filesystem::path& path) const;
    static CrmModel load(const std::filesystem::path& path, std::uint64_t seed = 0,
                         CrmMode mode = CrmMode::MeanOfItems);

private:
    Matrix user_factors_;
    Matrix item_factors_;
    std::uint64_t seed_;
    CrmMode mode_;
};

/// Per-sample pairwise loss -ln sigmoid(margin), computed stably.
double bpr_pair_loss(double margin);

struct BprGrads {
    Vec user;  // d(-ln sigmoid(x_ui - x_uj)) / d user row
    Vec pos;
    Vec neg;
};

/// Analytic gradient of the unregularized pairwise loss at one triple.
BprGrads bpr_gradients(std::span<const double> user_row, std::span<const double> pos_row,
                       std::span<const double> neg_row);

/// Stochastic gradient descent on the BPR objective with uniform negative
/// sampling over items the user has no positive interaction with.
/// Deterministic under config.seed. epoch_losses, when given, receives the
/// mean per-sample loss of each epoch.
CrmModel train_bpr_mf(const std::vector<Interaction>& train, std::size_t n_users,
                      std::size_t n_items, const CrmConfig& config,
                      std::vector<double>* epoch_losses = nullptr);

struct NeighborList {
    int target;
    std::vector<std::pair<int, double>> neighbors;  // (user index, inner product), descending
};

/// Collaborative sequence embedding for every user with a defined
/// embedding; entry is empty for users that have none (empty H(u) in
/// mean-of-items mode).
std::vector<Vec> user_sequence_embeddings(const CrmModel& model, const Corpus& corpus);

/// The k users most collaboratively similar to `target` by inner product
/// of sequence embeddings. Ties break by ascending user index; k clamps to
/// the number of candidates.
NeighborList top_k_collaborative(const CrmModel& model, const Corpus& corpus, int target,
                                 int k);

}  // namespace score
