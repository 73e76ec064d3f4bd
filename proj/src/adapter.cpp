// SPDX-License-Identifier: Apache-2.0
#include "score/adapter.hpp"

#include <algorithm>
#include <cmath>

#include "score/io.hpp"

namespace score {

Adapter make_adapter(std::size_t dim, double tau, std::uint64_t seed) {
    if (tau <= 0) throw ConfigError("tau must be > 0");
    if (dim < 2) throw ConfigError("adapter dimension must be >= 2");
    Adapter a;
    a.W = Matrix::identity(dim);
    a.tau = tau;
    a.seed = seed;
    Rng rng(seed);
    for (double& x : a.W.data()) x += 0.01 * rng.gaussian();
    return a;
}

EmbeddingVector adapter_embed(const Adapter& adapter, const EmbeddingVector& base) {
    if (base.zero) throw DomainError("cannot project a zero embedding");
    if (base.dim() != adapter.dim())
        throw DomainError("adapter dimension mismatch: " + std::to_string(adapter.dim()) +
                          " vs embedding " + std::to_string(base.dim()));
    EmbeddingVector out;
    out.values = matvec(adapter.W, base.values);
    if (!normalize(out.values))
        throw DomainError("degenerate projection: W maps embedding to zero");
    return out;
}

void save_adapter(const Adapter& adapter, const std::filesystem::path& path,
                  const std::string& magic) {
    ByteWriter w;
    w.bytes(magic);
    w.u32(static_cast<std::uint32_t>(adapter.dim()));
    w.f64(adapter.tau);
    for (std::size_t r = 0; r < adapter.W.rows(); ++r)
        for (double x : adapter.W.row(r)) w.f32(static_cast<float>(x));
    atomic_write_file(path, w.buffer());
}

Adapter load_adapter(const std::filesystem::path& path, const std::string& magic) {
    const std::string data = read_file(path);
    ByteReader r(data);
    if (r.bytes(magic.size()) != magic)
        throw IoError("bad magic in adapter artifact: " + path.string());
    Adapter a;
    const std::uint32_t dim = r.u32();
    a.tau = r.f64();
    if (a.tau <= 0) throw IoError("non-positive temperature in adapter: " + path.string());
    a.W = Matrix(dim, dim);
    for (double& x : a.W.data()) x = r.f32();
    if (!r.at_end()) throw IoError("trailing bytes in adapter artifact: " + path.string());
    return a;
}

namespace {

double stable_term_loss(double s_pos, const std::vector<double>& s_negs, double* p_pos,
                        std::vector<double>* p_negs) {
    // -log( exp(s_pos) / (exp(s_pos) + sum exp(s_neg)) ), log-sum-exp form.
    double m = s_pos;
    for (double s : s_negs) m = std::max(m, s);
    double z = std::exp(s_pos - m);
    const double z_pos = z;
    std::vector<double> zs;
    zs.reserve(s_negs.size());
    for (double s : s_negs) {
        zs.push_back(std::exp(s - m));
        z += zs.back();
    }
    if (p_pos) *p_pos = z_pos / z;
    if (p_negs) {
        p_negs->resize(zs.size());
        for (std::size_t i = 0; i < zs.size(); ++i) (*p_negs)[i] = zs[i] / z;
    }
    return -(s_pos - m) + std::log(z);
}

}  // namespace

double contrastive_loss(const std::vector<Vec>& embeddings,
                        const std::vector<ContrastiveTerm>& terms, double tau) {
    if (tau <= 0) throw ConfigError("tau must be > 0");
    double total = 0.0;
    std::vector<double> s_negs;
    for (const ContrastiveTerm& t : terms) {
        const Vec& a = embeddings.at(t.anchor);
        const double s_pos = dot(a, embeddings.at(t.positive)) / tau;
        s_negs.clear();
        for (int n : t.negatives) s_negs.push_back(dot(a, embeddings.at(n)) / tau);
        total += stable_term_loss(s_pos, s_negs, nullptr, nullptr);
    }
    return total;
}

double contrastive_loss_grad(const Matrix& W, const std::vector<Vec>& bases,
                             const std::vector<ContrastiveTerm>& terms, double tau,
                             Matrix* grad) {
    if (tau <= 0) throw ConfigError("tau must be > 0");
    const std::size_t n = bases.size();
    const std::size_t dim = W.rows();

    // Forward: project and normalize every base once.
    std::vector<Vec> projected(n);
    std::vector<double> norms(n);
    for (std::size_t v = 0; v < n; ++v) {
        projected[v] = matvec(W, bases[v]);
        norms[v] = norm2(projected[v]);
        if (!(norms[v] > 1e-12))
            throw DomainError("degenerate projection: W maps embedding to zero");
        for (double& x : projected[v]) x /= norms[v];
    }

    std::vector<Vec> grad_e;
    if (grad) grad_e.assign(n, Vec(dim, 0.0));

    double total = 0.0;
    std::vector<double> s_negs, p_negs;
    for (const ContrastiveTerm& t : terms) {
        const Vec& a = projected.at(t.anchor);
        const double s_pos = dot(a, projected.at(t.positive)) / tau;
        s_negs.clear();
        for (int nn : t.negatives) s_negs.push_back(dot(a, projected.at(nn)) / tau);
        double p_pos = 0.0;
        total += stable_term_loss(s_pos, s_negs, &p_pos, grad ? &p_negs : nullptr);
        if (!grad) continue;

        // dL/ds_pos = p_pos - 1; dL/ds_neg_i = p_neg_i; s_ab = cos(a,b)/tau.
        const double w_pos = (p_pos - 1.0) / tau;
        Vec& ga = grad_e[t.anchor];
        const Vec& ep = projected[t.positive];
        Vec& gp = grad_e[t.positive];
        for (std::size_t k = 0; k < dim; ++k) {
            ga[k] += w_pos * ep[k];
            gp[k] += w_pos * a[k];
        }
        for (std::size_t i = 0; i < t.negatives.size(); ++i) {
            const double w = p_negs[i] / tau;
            const Vec& en = projected[t.negatives[i]];
            Vec& gn = grad_e[t.negatives[i]];
            for (std::size_t k = 0; k < dim; ++k) {
                ga[k] += w * en[k];
                gn[k] += w * a[k];
            }
        }
    }

    if (grad) {
        // Backprop through normalization and the linear map:
        // g_y = (g_e - (g_e . e) e) / |y|;  dL/dW += g_y b^T.
        for (std::size_t v = 0; v < n; ++v) {
            const Vec& ge = grad_e[v];
            const Vec& e = projected[v];
            const double proj = dot(ge, e);
            for (std::size_t r = 0; r < dim; ++r) {
                const double gy = (ge[r] - proj * e[r]) / norms[v];
                if (gy == 0.0) continue;
                auto row = grad->row(r);
                const Vec& b = bases[v];
                for (std::size_t c = 0; c < dim; ++c) row[c] += gy * b[c];
            }
        }
    }
    return total;
}

}  // namespace score
