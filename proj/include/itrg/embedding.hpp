#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "itrg/error.hpp"
#include "itrg/hashing.hpp"

namespace itrg {

/// Fixed-dimension real vector. Producers must guarantee finite values and a
/// non-zero norm (cosine is undefined on zero vectors).
struct EmbeddingVector {
    std::vector<double> values;

    size_t dim() const { return values.size(); }
};

inline void validate_embedding(const EmbeddingVector& v, size_t expected_dim,
                               const std::string& what) {
    if (v.dim() != expected_dim) {
        throw DataError(what + ": embedding has dim " + std::to_string(v.dim()) +
                        ", expected " + std::to_string(expected_dim));
    }
    double norm_sq = 0.0;
    for (double x : v.values) {
        if (!std::isfinite(x)) {
            throw DataError(what + ": embedding contains a non-finite value");
        }
        norm_sq += x * x;
    }
    if (norm_sq == 0.0) {
        throw DataError(what + ": embedding is the zero vector");
    }
}

inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw DataError("cosine: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                        std::to_string(b.dim()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw DataError("cosine: zero-norm input");
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Shared-encoder contract: one instance embeds both queries and documents,
/// deterministically. identity_label names the model/version so indexes can
/// reject queries embedded by something else.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual size_t dim() const = 0;
    virtual std::string identity_label() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;

    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) {
            out.push_back(embed(t));
        }
        return out;
    }
};

/// Deterministic reference embedder: hashed unigram counts, L2-normalized.
/// Tokens are maximal runs of ASCII alphanumerics or bytes >= 0x80, lowercased
/// (ASCII range). Texts with no tokens fall back to a sentinel bucket so the
/// vector is never zero.
class HashedEmbedder : public Embedder {
public:
    static constexpr uint64_t kHashSeed = 0x9e3779b97f4a7c15ULL;

    explicit HashedEmbedder(size_t dim = 256) : dim_(dim) {
        if (dim_ == 0) {
            throw ConfigError("embedder dim must be positive");
        }
    }

    size_t dim() const override { return dim_; }

    std::string identity_label() const override {
        return "hashed-unigram-v1:d" + std::to_string(dim_);
    }

    EmbeddingVector embed(std::string_view text) const override {
        EmbeddingVector v;
        v.values.assign(dim_, 0.0);
        std::string token;
        bool any = false;
        auto flush = [&] {
            if (token.empty()) {
                return;
            }
            v.values[fnv1a64(token, kHashSeed) % dim_] += 1.0;
            any = true;
            token.clear();
        };
        for (unsigned char c : text) {
            // Locale-independent: ASCII alnum or any byte >= 0x80 is a token byte.
            const bool token_byte =
                (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
            if (token_byte) {
                token.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
            } else {
                flush();
            }
        }
        flush();
        if (!any) {
            v.values[fnv1a64("", kHashSeed) % dim_] = 1.0;
        }
        double norm = 0.0;
        for (double x : v.values) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : v.values) {
            x /= norm;
        }
        return v;
    }

private:
    size_t dim_;
};

} // namespace itrg
