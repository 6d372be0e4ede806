#include "kgalign/lexicon.hpp"

#include "kgalign/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kgalign {

namespace bundled_data {
// Generated from data/*.txt at configure time.
extern const char* const kStopWords;
extern const char* const kLemmaExceptions;
extern const char* const kRelations;
}  // namespace bundled_data

namespace {

template <typename Fn>
void for_each_entry(std::string_view text, Fn&& fn) {
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;
        fn(line);
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open lexicon file '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Lexicon Lexicon::parse(std::string_view stop_words, std::string_view lemma_exceptions,
                       std::string_view relations) {
    Lexicon lex;
    for_each_entry(stop_words, [&](std::string_view w) { lex.stop_words_.emplace(w); });
    for_each_entry(lemma_exceptions, [&](std::string_view line) {
        const auto sep = line.find_first_of(" \t");
        if (sep == std::string_view::npos) throw ValidationError("lemma exception without lemma: " + std::string(line));
        auto lemma = line.substr(sep + 1);
        while (!lemma.empty() && (lemma.front() == ' ' || lemma.front() == '\t')) lemma.remove_prefix(1);
        lex.exceptions_.try_emplace(std::string(line.substr(0, sep)), lemma);
    });
    for_each_entry(relations, [&](std::string_view r) {
        if (lex.relation_set_.emplace(r).second) lex.relations_.emplace_back(r);
    });
    std::sort(lex.relations_.begin(), lex.relations_.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& stop_words, const std::filesystem::path& lemma_exceptions,
                      const std::filesystem::path& relations) {
    return parse(read_file(stop_words), read_file(lemma_exceptions), read_file(relations));
}

const Lexicon& Lexicon::bundled() {
    static const Lexicon lex =
        parse(bundled_data::kStopWords, bundled_data::kLemmaExceptions, bundled_data::kRelations);
    return lex;
}

std::optional<std::string_view> Lexicon::lemma_exception(std::string_view word) const {
    auto it = exceptions_.find(std::string(word));
    if (it == exceptions_.end()) return std::nullopt;
    return std::string_view(it->second);
}

}  // namespace kgalign
