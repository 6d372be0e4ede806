#pragma once
// Concept linking: maps text spans onto knowledge-graph concepts.
//
// link_basic   - whitespace tokens, exact label match
// link_enhanced - n-grams up to max_ngram, lemmatized, stop-word filtered,
//                 longest non-overlapping matches win

#include "kgalign/corpus.hpp"
#include "kgalign/kg_store.hpp"
#include "kgalign/lexicon.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgalign {

/// Rule-based English lemmatizer: exception table first, then ordered
/// suffix rules applied until none fires. Idempotent on its outputs.
class Lemmatizer {
public:
    explicit Lemmatizer(const Lexicon& lexicon = Lexicon::bundled()) : lexicon_(&lexicon) {}

    std::string lemmatize(std::string_view token) const;

private:
    const Lexicon* lexicon_;
};

std::string lemmatize(std::string_view token);

struct TextSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

/// Whitespace token with surrounding punctuation removed.
struct Token {
    std::string text;  // normalized (lowercase)
    TextSpan span;     // byte offsets into the source text
};

std::vector<Token> tokenize(std::string_view text);

enum class Side { query, answer };

struct LinkedConcept {
    ConceptId id;
    TextSpan span;
    std::size_t first_token = 0;
    std::size_t token_count = 1;
    std::string matched;  // graph label that was matched

    friend bool operator==(const LinkedConcept&, const LinkedConcept&) = default;
};

/// Concepts in order of first occurrence, no duplicate ids.
struct ConceptSet {
    Side side = Side::query;
    std::vector<LinkedConcept> concepts;

    bool empty() const noexcept { return concepts.empty(); }
    std::size_t size() const noexcept { return concepts.size(); }
};

enum class Task { stance, choice };

struct AlignmentQuery {
    Task task = Task::stance;
    std::string context;
    std::string q_text;
    std::string a_text;
};

/// Throws ValidationError on empty belief/argument/premise.
AlignmentQuery build_query(const StanceSample& sample);
AlignmentQuery build_query(const ChoiceSample& sample);
AlignmentQuery build_stance_query(std::string_view belief, std::string_view argument);
AlignmentQuery build_choice_query(std::string_view premise, std::string_view alt1, std::string_view alt2);

inline constexpr std::size_t kDefaultMaxNgram = 4;

/// Holds the per-graph lemma index used by enhanced matching. The index is
/// built lazily, once, on the first enhanced call; all calls are thread-safe.
class ConceptLinker {
public:
    explicit ConceptLinker(const KnowledgeGraph& graph, const Lexicon& lexicon = Lexicon::bundled());

    ConceptSet link_basic(std::string_view text, Side side = Side::query) const;

    ConceptSet link_enhanced(std::string_view text, std::size_t max_ngram = kDefaultMaxNgram,
                             Side side = Side::query) const;

    const KnowledgeGraph& graph() const noexcept { return *graph_; }
    const Lemmatizer& lemmatizer() const noexcept { return lemmatizer_; }

private:
    std::optional<ConceptId> match(std::string_view surface, std::string_view lemma) const;
    void build_lemma_index() const;

    const KnowledgeGraph* graph_;
    const Lexicon* lexicon_;
    Lemmatizer lemmatizer_;
    mutable std::once_flag lemma_once_;
    mutable std::unordered_map<std::string, std::uint32_t> lemma_index_;
};

ConceptSet link_basic(std::string_view text, const KnowledgeGraph& graph);
ConceptSet link_enhanced(std::string_view text, const KnowledgeGraph& graph,
                         std::size_t max_ngram = kDefaultMaxNgram);

}  // namespace kgalign
