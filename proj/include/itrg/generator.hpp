#pragma once

#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "itrg/corpus.hpp"
#include "itrg/error.hpp"
#include "itrg/hashing.hpp"

namespace itrg {

enum class Decoding { greedy };

struct DecodingParams {
    Decoding strategy = Decoding::greedy;
    int max_new_tokens = 0;

    static DecodingParams document_defaults() { return {Decoding::greedy, 200}; }
    static DecodingParams answer_defaults() { return {Decoding::greedy, 15}; }
};

/// Text-completion contract. With greedy decoding implementations are
/// expected to be deterministic; the mocks guarantee it. Implementations must
/// tolerate concurrent calls up to their configured in-flight limit.
class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;

    virtual std::string identity_label() const = 0;
    virtual std::string complete_raw(const std::string& prompt, const DecodingParams& params) = 0;
};

/// Calls the backend and returns its continuation, trimmed of leading
/// whitespace only. Empty output is a hard error carrying the prompt digest.
inline std::string complete(CompletionBackend& backend, const std::string& prompt,
                            const DecodingParams& params) {
    if (prompt.empty()) {
        throw DataError("completion prompt is empty");
    }
    if (params.max_new_tokens < 1) {
        throw ConfigError("max_new_tokens must be positive");
    }
    std::string out = backend.complete_raw(prompt, params);
    size_t start = out.find_first_not_of(" \t\r\n");
    out = start == std::string::npos ? std::string() : out.substr(start);
    if (out.empty()) {
        throw BackendError("backend '" + backend.identity_label() +
                           "' returned empty output for prompt " + prompt_digest(prompt));
    }
    return out;
}

/// Answer completions are short (15-token budget); the answer is the text up
/// to the first newline, trimmed.
inline std::string extract_answer(std::string_view completion) {
    size_t nl = completion.find('\n');
    std::string_view line = nl == std::string_view::npos ? completion : completion.substr(0, nl);
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    size_t e = line.find_last_not_of(" \t\r");
    return std::string(line.substr(b, e - b + 1));
}

// ---------------------------------------------------------------------------
// Prompt templates: UTF-8 bodies with {{slot}} markers, substituted in one
// left-to-right pass so slot values are never rescanned.
// ---------------------------------------------------------------------------

inline std::string render_template(std::string_view body,
                                   const std::unordered_map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(body.size());
    size_t pos = 0;
    while (pos < body.size()) {
        size_t open = body.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(body.substr(pos));
            break;
        }
        size_t close = body.find("}}", open + 2);
        if (close == std::string_view::npos) {
            throw ConfigError("template has an unterminated {{slot}} marker");
        }
        out.append(body.substr(pos, open - pos));
        std::string name(body.substr(open + 2, close - open - 2));
        auto it = slots.find(name);
        if (it == slots.end()) {
            throw ConfigError("template slot '" + name + "' is unfilled");
        }
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

/// The five prompt bodies used by the pipeline. Each can be overridden from a
/// template file; required slots are checked when a set is constructed.
struct TemplateSet {
    std::string refresh =
        "In the following task, you should write a document that contains the answer to the "
        "question.\n"
        "\n"
        "Passage: {{passages}}\n"
        "Question: {{question}}\n"
        "Document:";
    std::string refine =
        "Here is a draft document you previously wrote:\n"
        "{{draft}}\n"
        "\n"
        "In the following task, you should improve the draft document so that it contains the "
        "answer to the question, using the new passages.\n"
        "\n"
        "Passage: {{passages}}\n"
        "Question: {{question}}\n"
        "Document:";
    // Document generation without retrieval (generate-then-read baseline).
    std::string generate =
        "In the following task, you should write a document that contains the answer to the "
        "question.\n"
        "\n"
        "Question: {{question}}\n"
        "Document:";
    // One question block; demonstrations append their answer after the cue.
    std::string answer =
        "Passage: {{passage}}\n"
        "Question: {{question}}\n"
        "Answer:";
    std::string vanilla_answer =
        "Question: {{question}}\n"
        "Answer:";

    void validate() const {
        require_slots(refresh, "refresh", {"passages", "question"});
        require_slots(refine, "refine", {"draft", "passages", "question"});
        require_slots(generate, "generate", {"question"});
        require_slots(answer, "answer", {"passage", "question"});
        require_slots(vanilla_answer, "vanilla_answer", {"question"});
    }

private:
    static void require_slots(const std::string& body, const std::string& name,
                              std::initializer_list<const char*> slots) {
        for (const char* slot : slots) {
            if (body.find("{{" + std::string(slot) + "}}") == std::string::npos) {
                throw ConfigError("template '" + name + "' is missing slot {{" +
                                  std::string(slot) + "}}");
            }
        }
    }
};

inline std::string load_template_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("template file not found: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Joins document texts with single newlines, no titles.
inline std::string join_passages(const std::vector<Document>& docs) {
    std::string out;
    for (size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) {
            out.push_back('\n');
        }
        out.append(docs[i].text);
    }
    return out;
}

inline std::string render_refresh_prompt(const std::string& question,
                                         const std::vector<Document>& docs,
                                         const TemplateSet& templates = {}) {
    if (docs.empty()) {
        throw DataError("refresh prompt needs at least one document");
    }
    return render_template(templates.refresh,
                           {{"passages", join_passages(docs)}, {"question", question}});
}

inline std::string render_refine_prompt(const std::string& y_prev, const std::string& question,
                                        const std::vector<Document>& update_docs,
                                        const TemplateSet& templates = {}) {
    if (update_docs.empty()) {
        throw DataError("refine prompt needs at least one updated document");
    }
    return render_template(templates.refine, {{"draft", y_prev},
                                              {"passages", join_passages(update_docs)},
                                              {"question", question}});
}

inline std::string render_generate_prompt(const std::string& question,
                                          const TemplateSet& templates = {}) {
    return render_template(templates.generate, {{"question", question}});
}

struct Demonstration {
    std::string question;
    std::string context; // empty renders the block without a Passage line
    std::string answer;
};

/// Demonstrations first, in order, then the target block; the prompt always
/// ends with the "Answer:" cue.
inline std::string render_answer_prompt(const std::string& question, const std::string& context_doc,
                                        const std::vector<Demonstration>& demonstrations,
                                        const TemplateSet& templates = {}) {
    auto block = [&](const std::string& q, const std::string& ctx) {
        if (ctx.empty()) {
            return render_template(templates.vanilla_answer, {{"question", q}});
        }
        return render_template(templates.answer, {{"passage", ctx}, {"question", q}});
    };
    std::string out;
    for (const Demonstration& demo : demonstrations) {
        out += block(demo.question, demo.context);
        out += " " + demo.answer + "\n\n";
    }
    out += block(question, context_doc);
    return out;
}

// ---------------------------------------------------------------------------
// Deterministic mock backends
// ---------------------------------------------------------------------------

struct BackendCall {
    std::string prompt;
    int max_new_tokens = 0;
};

class MockBackend : public CompletionBackend {
public:
    std::vector<BackendCall> calls() const {
        std::lock_guard lock(mutex_);
        return calls_;
    }

    size_t call_count() const {
        std::lock_guard lock(mutex_);
        return calls_.size();
    }

    /// Calls issued with a given token budget (separates document generation
    /// from answer generation in tests).
    size_t call_count_with_budget(int max_new_tokens) const {
        std::lock_guard lock(mutex_);
        size_t n = 0;
        for (const auto& c : calls_) {
            n += c.max_new_tokens == max_new_tokens ? 1 : 0;
        }
        return n;
    }

protected:
    void record(const std::string& prompt, const DecodingParams& params) {
        std::lock_guard lock(mutex_);
        calls_.push_back({prompt, params.max_new_tokens});
    }

private:
    mutable std::mutex mutex_;
    std::vector<BackendCall> calls_;
};

/// Pure function of the prompt bytes.
class EchoBackend : public MockBackend {
public:
    std::string identity_label() const override { return "mock:echo"; }

    std::string complete_raw(const std::string& prompt, const DecodingParams& params) override {
        record(prompt, params);
        return "echo " + prompt_digest(prompt);
    }
};

/// Fixed prompt -> output map; unmapped prompts are a hard error.
class MapBackend : public MockBackend {
public:
    MapBackend() = default;
    explicit MapBackend(std::unordered_map<std::string, std::string> responses)
        : responses_(std::move(responses)) {}

    void add(std::string prompt, std::string output) {
        responses_[std::move(prompt)] = std::move(output);
    }

    std::string identity_label() const override { return "mock:map"; }

    std::string complete_raw(const std::string& prompt, const DecodingParams& params) override {
        record(prompt, params);
        auto it = responses_.find(prompt);
        if (it == responses_.end()) {
            throw BackendError("map mock has no entry for prompt " + prompt_digest(prompt));
        }
        return it->second;
    }

private:
    std::unordered_map<std::string, std::string> responses_;
};

/// Reads the prompt's final Passage block. For document prompts it returns the
/// first passage sentence containing the target string (or the first sentence
/// when none does); for answer prompts it returns the target if the block
/// contains it, else a fixed fallback. Keeps closed-loop recall/EM dynamics
/// fully offline.
class ExtractiveBackend : public MockBackend {
public:
    explicit ExtractiveBackend(std::string target, std::string fallback_answer = "unknown")
        : target_(std::move(target)), fallback_answer_(std::move(fallback_answer)) {}

    std::string identity_label() const override { return "mock:extractive"; }

    std::string complete_raw(const std::string& prompt, const DecodingParams& params) override {
        record(prompt, params);
        const std::string passage = last_passage_block(prompt);
        if (prompt.ends_with("Answer:")) {
            if (!passage.empty() && passage.find(target_) != std::string::npos) {
                return target_;
            }
            return fallback_answer_;
        }
        if (passage.empty()) {
            return "No supporting passage was retrieved.";
        }
        std::vector<std::string> sentences = split_sentences(passage);
        for (const std::string& s : sentences) {
            if (s.find(target_) != std::string::npos) {
                return s;
            }
        }
        return sentences.empty() ? passage : sentences.front();
    }

private:
    static std::string last_passage_block(const std::string& prompt) {
        size_t start = prompt.rfind("Passage: ");
        if (start == std::string::npos) {
            return {};
        }
        start += 9;
        size_t end = prompt.find("\nQuestion:", start);
        return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
    }

    static std::vector<std::string> split_sentences(const std::string& text) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : text) {
            cur.push_back(c);
            if (c == '.' || c == '!' || c == '?') {
                push_trimmed(out, cur);
                cur.clear();
            }
        }
        push_trimmed(out, cur);
        return out;
    }

    static void push_trimmed(std::vector<std::string>& out, const std::string& s) {
        size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) {
            return;
        }
        size_t e = s.find_last_not_of(" \t\r\n");
        out.push_back(s.substr(b, e - b + 1));
    }

    std::string target_;
    std::string fallback_answer_;
};

} // namespace itrg
