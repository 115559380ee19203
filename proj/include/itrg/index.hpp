#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "itrg/corpus.hpp"
#include "itrg/embedding.hpp"
#include "itrg/error.hpp"

namespace itrg {

/// Flat dense index: one embedding row per corpus document, positionally
/// aligned with doc_ids. Immutable after build; safe for concurrent queries.
struct DenseIndex {
    size_t dim = 0;
    std::string embedder_label;
    std::vector<std::string> doc_ids;
    std::vector<double> vectors; // row-major, doc_ids.size() x dim

    size_t size() const { return doc_ids.size(); }

    std::span<const double> row(size_t pos) const {
        return std::span<const double>(vectors).subspan(pos * dim, dim);
    }
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

struct RetrievalResult {
    std::vector<ScoredDoc> entries; // score descending, ties by ascending doc_id
    int k = 0;
    std::string backend = "exact"; // retrieval backend that produced it
};

inline DenseIndex build_index(const Corpus& corpus, const Embedder& embedder) {
    if (corpus.empty()) {
        throw DataError("cannot build index over an empty corpus");
    }
    DenseIndex index;
    index.dim = embedder.dim();
    index.embedder_label = embedder.identity_label();
    index.doc_ids.reserve(corpus.size());
    index.vectors.reserve(corpus.size() * index.dim);

    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const Document& doc : corpus) {
        index.doc_ids.push_back(doc.id);
        texts.push_back(doc.text);
    }
    std::vector<EmbeddingVector> rows = embedder.embed_batch(texts);
    if (rows.size() != corpus.size()) {
        throw BackendError("embedder returned " + std::to_string(rows.size()) +
                           " vectors for " + std::to_string(corpus.size()) + " documents");
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        validate_embedding(rows[i], index.dim, "document '" + index.doc_ids[i] + "'");
        index.vectors.insert(index.vectors.end(), rows[i].values.begin(), rows[i].values.end());
    }
    return index;
}

namespace detail {

inline double cosine_row(std::span<const double> row, const EmbeddingVector& q, double q_norm) {
    double dot = 0.0, n = 0.0;
    for (size_t i = 0; i < row.size(); ++i) {
        dot += row[i] * q.values[i];
        n += row[i] * row[i];
    }
    return dot / (std::sqrt(n) * q_norm);
}

} // namespace detail

/// Exact scan over all documents; scores are cosine similarities in double
/// precision, ordered by score descending then doc_id ascending (exact-equality
/// ties only).
inline RetrievalResult retrieve_top_k(const DenseIndex& index, const Embedder& embedder,
                                      const std::string& query_text, int k) {
    if (embedder.identity_label() != index.embedder_label) {
        throw ConfigError("embedder '" + embedder.identity_label() +
                          "' does not match index embedder '" + index.embedder_label + "'");
    }
    if (query_text.empty()) {
        throw DataError("query text is empty");
    }
    if (k < 1) {
        throw ConfigError("k must be >= 1");
    }
    EmbeddingVector q = embedder.embed(query_text);
    validate_embedding(q, index.dim, "query");
    double q_norm = 0.0;
    for (double x : q.values) {
        q_norm += x * x;
    }
    q_norm = std::sqrt(q_norm);

    const size_t n = index.size();
    std::vector<double> scores(n);
    for (size_t i = 0; i < n; ++i) {
        scores[i] = detail::cosine_row(index.row(i), q, q_norm);
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const size_t take = std::min<size_t>(static_cast<size_t>(k), n);
    std::partial_sort(order.begin(), order.begin() + take, order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return index.doc_ids[a] < index.doc_ids[b];
    });

    RetrievalResult result;
    result.k = k;
    result.backend = "exact";
    result.entries.reserve(take);
    for (size_t i = 0; i < take; ++i) {
        result.entries.push_back({index.doc_ids[order[i]], scores[order[i]]});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Persistence: little-endian binary layout
//   magic "ITRGIDX1" | u32 version | u32 dim | u64 count
//   u32 label_len | label bytes
//   count x (u32 id_len | id bytes)
//   count*dim f64 vector block
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr char kIndexMagic[8] = {'I', 'T', 'R', 'G', 'I', 'D', 'X', '1'};
inline constexpr uint32_t kIndexVersion = 1;

inline void put_u32(std::ostream& out, uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    out.write(b, 4);
}

inline void put_u64(std::ostream& out, uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    out.write(b, 8);
}

inline uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | b[i];
    }
    return v;
}

inline uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | b[i];
    }
    return v;
}

} // namespace detail

inline void save_index(const DenseIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write index file: " + path);
    }
    out.write(detail::kIndexMagic, sizeof(detail::kIndexMagic));
    detail::put_u32(out, detail::kIndexVersion);
    detail::put_u32(out, static_cast<uint32_t>(index.dim));
    detail::put_u64(out, index.size());
    detail::put_u32(out, static_cast<uint32_t>(index.embedder_label.size()));
    out.write(index.embedder_label.data(), static_cast<std::streamsize>(index.embedder_label.size()));
    for (const std::string& id : index.doc_ids) {
        detail::put_u32(out, static_cast<uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    for (double x : index.vectors) {
        detail::put_u64(out, std::bit_cast<uint64_t>(x));
    }
    if (!out) {
        throw DataError("failed writing index file: " + path);
    }
}

inline DenseIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("index file not found: " + path);
    }
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, detail::kIndexMagic, 8) != 0) {
        throw DataError("not an index file: " + path);
    }
    uint32_t version = detail::get_u32(in);
    if (version != detail::kIndexVersion) {
        throw DataError("unsupported index version " + std::to_string(version) + " in " + path);
    }
    DenseIndex index;
    index.dim = detail::get_u32(in);
    const uint64_t count = detail::get_u64(in);
    uint32_t label_len = detail::get_u32(in);
    index.embedder_label.resize(label_len);
    in.read(index.embedder_label.data(), label_len);
    index.doc_ids.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        uint32_t id_len = detail::get_u32(in);
        std::string id(id_len, '\0');
        in.read(id.data(), id_len);
        index.doc_ids.push_back(std::move(id));
    }
    index.vectors.resize(count * index.dim);
    for (double& x : index.vectors) {
        x = std::bit_cast<double>(detail::get_u64(in));
    }
    if (!in) {
        throw DataError("truncated index file: " + path);
    }
    return index;
}

} // namespace itrg
