// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "score/linalg.hpp"
#include "score/providers.hpp"

namespace score {

/// Trainable square projection over frozen provider embeddings; the
/// learned unit of both the retriever and the reranker.
struct Adapter {
    Matrix W;
    double tau = 0.1;
    std::uint64_t seed = 42;

    std::size_t dim() const { return W.rows(); }
};

/// Identity plus seeded Gaussian noise (sigma = 0.01).
Adapter make_adapter(std::size_t dim, double tau, std::uint64_t seed);

struct AdapterTrainInfo {
    double initial_loss = 0.0;  // mean term loss before any update
    double final_loss = 0.0;    // mean term loss after the last epoch
    std::size_t instances = 0;
};

/// normalize(W * base). Input must be a unit vector of matching dimension;
/// a numerically zero projection is an error.
EmbeddingVector adapter_embed(const Adapter& adapter, const EmbeddingVector& base);

/// Artifact layout: magic, u32 dimension, f64 temperature, W row-major f32.
void save_adapter(const Adapter& adapter, const std::filesystem::path& path,
                  const std::string& magic);
Adapter load_adapter(const std::filesystem::path& path, const std::string& magic);

constexpr const char* kCarAdapterMagic = "ADP1";
constexpr const char* kSareAdapterMagic = "ADP2";

/// One InfoNCE term: -log( g(a,p) / (g(a,p) + sum_n g(a,n)) ) with
/// g(x,y) = exp(cos(x,y)/tau). Indices refer to a shared vector set.
struct ContrastiveTerm {
    int anchor;
    int positive;
    std::vector<int> negatives;
};

/// Sum of term losses over unit embeddings.
double contrastive_loss(const std::vector<Vec>& embeddings,
                        const std::vector<ContrastiveTerm>& terms, double tau);

/// Loss of the projected pipeline e_v = normalize(W * base_v); when grad is
/// non-null, accumulates dLoss/dW into it (caller zeroes). Returns the
/// summed loss.
double contrastive_loss_grad(const Matrix& W, const std::vector<Vec>& bases,
                             const std::vector<ContrastiveTerm>& terms, double tau,
                             Matrix* grad);

}  // namespace score
