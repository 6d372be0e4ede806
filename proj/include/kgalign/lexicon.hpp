#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kgalign {

/// Word lists the linker, lemmatizer and gold-graph validation rely on:
/// stop words, lemma exceptions and the relation vocabulary. The bundled
/// instance is compiled from data/*.txt.
class Lexicon {
public:
    static const Lexicon& bundled();

    /// Each argument is the content of one data file: one entry per line,
    /// '#' starts a comment line. Exceptions are "inflected lemma" pairs.
    static Lexicon parse(std::string_view stop_words, std::string_view lemma_exceptions,
                         std::string_view relations);

    static Lexicon load(const std::filesystem::path& stop_words, const std::filesystem::path& lemma_exceptions,
                        const std::filesystem::path& relations);

    bool is_stop_word(std::string_view word) const { return stop_words_.contains(std::string(word)); }

    std::optional<std::string_view> lemma_exception(std::string_view word) const;

    bool is_relation(std::string_view label) const { return relation_set_.contains(std::string(label)); }

    /// Relation labels, longest first (ties alphabetical).
    const std::vector<std::string>& relations() const noexcept { return relations_; }

    const std::unordered_set<std::string>& stop_words() const noexcept { return stop_words_; }
    const std::unordered_map<std::string, std::string>& lemma_exceptions() const noexcept { return exceptions_; }

private:
    std::unordered_set<std::string> stop_words_;
    std::unordered_map<std::string, std::string> exceptions_;
    std::vector<std::string> relations_;
    std::unordered_set<std::string> relation_set_;
};

}  // namespace kgalign
