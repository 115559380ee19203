#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "itrg/error.hpp"

namespace itrg {

/// One corpus paragraph. Text is kept byte-exact as ingested; no
/// normalization happens at this layer.
struct Document {
    std::string id;
    std::string title;
    std::string text;
};

inline bool is_blank(std::string_view s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

/// Immutable after construction; iteration order is ingestion order.
/// Safe for concurrent readers.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::string source_label) : source_label_(std::move(source_label)) {}

    void add(Document doc) {
        if (doc.id.empty()) {
            throw DataError("document id must be non-empty");
        }
        if (is_blank(doc.text)) {
            throw DataError("document '" + doc.id + "' has empty text");
        }
        auto [it, inserted] = by_id_.emplace(doc.id, docs_.size());
        if (!inserted) {
            throw DataError("duplicate document id '" + doc.id + "'");
        }
        docs_.push_back(std::move(doc));
    }

    const Document& at(size_t pos) const { return docs_.at(pos); }

    const Document& get(const std::string& id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) {
            throw DataError("document id '" + id + "' not found in corpus");
        }
        return docs_[it->second];
    }

    bool contains(const std::string& id) const { return by_id_.count(id) > 0; }

    size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

    auto begin() const { return docs_.begin(); }
    auto end() const { return docs_.end(); }

    const std::string& source_label() const { return source_label_; }
    void set_source_label(std::string label) { source_label_ = std::move(label); }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, size_t> by_id_;
    std::string source_label_;
};

inline const Document& get_document(const Corpus& corpus, const std::string& id) {
    return corpus.get(id);
}

inline std::string manifest_path_for(const std::string& corpus_path) {
    return corpus_path + ".manifest.json";
}

/// Reads a corpus from a JSONL file: one object per line with string fields
/// "id", "title" (optional) and "text". A sidecar manifest, when present,
/// supplies the source label; otherwise the file stem is used.
inline Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("corpus file not found: " + path);
    }

    Corpus corpus(std::filesystem::path(path).stem().string());

    const std::string manifest = manifest_path_for(path);
    if (std::filesystem::exists(manifest)) {
        std::ifstream min(manifest, std::ios::binary);
        nlohmann::json m = nlohmann::json::parse(min, nullptr, false);
        if (!m.is_discarded() && m.contains("source_label") && m["source_label"].is_string()) {
            corpus.set_source_label(m["source_label"].get<std::string>());
        }
    }

    std::unordered_map<std::string, size_t> first_line_of;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed corpus record");
        }
        if (!rec.contains("id") || !rec["id"].is_string() || rec["id"].get<std::string>().empty()) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": corpus record needs a non-empty string \"id\"");
        }
        if (!rec.contains("text") || !rec["text"].is_string()) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": corpus record needs a string \"text\"");
        }
        Document doc;
        doc.id = rec["id"].get<std::string>();
        doc.text = rec["text"].get<std::string>();
        if (rec.contains("title")) {
            if (!rec["title"].is_string()) {
                throw DataError(path + ":" + std::to_string(line_no) + ": \"title\" must be a string");
            }
            doc.title = rec["title"].get<std::string>();
        }
        if (is_blank(doc.text)) {
            throw DataError(path + ":" + std::to_string(line_no) + ": document '" + doc.id +
                            "' has empty text");
        }
        auto prev = first_line_of.find(doc.id);
        if (prev != first_line_of.end()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate document id '" +
                            doc.id + "' (first seen at line " + std::to_string(prev->second) + ")");
        }
        first_line_of.emplace(doc.id, line_no);
        corpus.add(std::move(doc));
    }
    return corpus;
}

/// Writes the corpus as JSONL plus its manifest sidecar.
inline void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write corpus file: " + path);
    }
    for (const Document& doc : corpus) {
        nlohmann::json rec{{"id", doc.id}, {"title", doc.title}, {"text", doc.text}};
        out << rec.dump() << "\n";
    }
    std::ofstream mout(manifest_path_for(path), std::ios::binary | std::ios::trunc);
    nlohmann::json m{{"source_label", corpus.source_label()},
                     {"document_count", corpus.size()}};
    mout << m.dump(2) << "\n";
}

} // namespace itrg
