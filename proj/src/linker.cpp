#include "kgalign/linker.hpp"

#include "kgalign/errors.hpp"

#include <algorithm>
#include <cctype>

namespace kgalign {

// ---------------------------------------------------------------------------
// Lemmatizer

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool is_consonant_at(std::string_view w, std::size_t i) {
    const char c = w[i];
    if (is_vowel(c)) return false;
    if (c == 'y') return i == 0 || is_vowel(w[i - 1]);
    return true;
}

bool has_vowel(std::string_view w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!is_consonant_at(w, i)) return true;
    }
    return false;
}

std::size_t vowel_groups(std::string_view w) {
    std::size_t groups = 0;
    bool in_group = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const bool v = !is_consonant_at(w, i);
        if (v && !in_group) ++groups;
        in_group = v;
    }
    return groups;
}

bool ends_with(std::string_view w, std::string_view suffix) { return w.ends_with(suffix); }

// Repairs a stem left by stripping -ed / -ing.
std::string restore_stem(std::string stem) {
    const std::size_t n = stem.size();
    const char last = stem[n - 1];
    if (n >= 4 && last == stem[n - 2] && is_consonant_at(stem, n - 1) && last != 'l' && last != 's' &&
        last != 'z') {
        stem.pop_back();  // stopped -> stop
        return stem;
    }
    if (last == 'u' || last == 'v' || last == 'c' || last == 'z') {
        stem.push_back('e');  // argued -> argue, received -> receive
        return stem;
    }
    // Single-syllable consonant-vowel-consonant stems lost a silent e.
    if (n >= 3 && is_consonant_at(stem, n - 1) && !is_consonant_at(stem, n - 2) && is_consonant_at(stem, n - 3) &&
        last != 'w' && last != 'x' && last != 'y' && vowel_groups(stem) == 1) {
        stem.push_back('e');  // closed -> close
    }
    return stem;
}

// One suffix rule. Returns false when no rule fires.
bool strip_once(std::string& w) {
    const std::size_t n = w.size();
    if (n <= 3) return false;
    if (ends_with(w, "ies") && n > 4) {
        w.replace(n - 3, 3, "y");
        return true;
    }
    if (ends_with(w, "sses")) {
        w.resize(n - 2);
        return true;
    }
    if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return false;
    if (ends_with(w, "ied") && n > 4) {
        w.replace(n - 3, 3, "y");
        return true;
    }
    if (ends_with(w, "eed")) return false;
    if (ends_with(w, "ing")) {
        std::string stem = w.substr(0, n - 3);
        if (stem.size() < 3 || !has_vowel(stem)) return false;
        w = restore_stem(std::move(stem));
        return true;
    }
    if (ends_with(w, "ed")) {
        std::string stem = w.substr(0, n - 2);
        if (stem.size() < 3 || !has_vowel(stem)) return false;
        w = restore_stem(std::move(stem));
        return true;
    }
    if (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes") || ends_with(w, "zzes")) {
        w.resize(n - 2);
        return true;
    }
    if (ends_with(w, "s")) {
        w.resize(n - 1);
        return true;
    }
    return false;
}

bool all_lower_alpha(std::string_view w) {
    return std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

std::string Lemmatizer::lemmatize(std::string_view token) const {
    std::string w(token);
    if (!all_lower_alpha(w)) return w;
    // Every rule shortens the word, so this terminates.
    while (true) {
        if (auto ex = lexicon_->lemma_exception(w)) return std::string(*ex);
        if (!strip_once(w)) return w;
    }
}

std::string lemmatize(std::string_view token) {
    static const Lemmatizer lemmatizer;
    return lemmatizer.lemmatize(token);
}

// ---------------------------------------------------------------------------
// Tokenization and queries

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    const auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    const auto punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && space(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !space(text[j])) ++j;
        std::size_t b = i;
        std::size_t e = j;
        while (b < e && punct(text[b])) ++b;
        while (e > b && punct(text[e - 1])) --e;
        if (b < e) {
            std::string norm = normalize_label(text.substr(b, e - b));
            if (!norm.empty()) out.push_back(Token{std::move(norm), TextSpan{b, e}});
        }
        i = j;
    }
    return out;
}

namespace {

void require_text(std::string_view value, const char* field) {
    const bool blank = std::all_of(value.begin(), value.end(),
                                   [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
    if (blank) throw ValidationError(std::string("empty ") + field);
}

std::string join_space(std::initializer_list<std::string_view> parts) {
    std::string out;
    for (auto p : parts) {
        if (!out.empty()) out.push_back(' ');
        out.append(p);
    }
    return out;
}

}  // namespace

AlignmentQuery build_stance_query(std::string_view belief, std::string_view argument) {
    require_text(belief, "belief");
    require_text(argument, "argument");
    AlignmentQuery q;
    q.task = Task::stance;
    q.q_text = std::string(belief);
    q.a_text = std::string(argument);
    q.context = join_space({belief, argument});
    return q;
}

AlignmentQuery build_choice_query(std::string_view premise, std::string_view alt1, std::string_view alt2) {
    require_text(premise, "premise");
    require_text(alt1, "alt1");
    require_text(alt2, "alt2");
    AlignmentQuery q;
    q.task = Task::choice;
    q.q_text = join_space({premise, alt1});
    q.a_text = join_space({premise, alt2});
    q.context = join_space({premise, alt1, alt2});
    return q;
}

AlignmentQuery build_query(const StanceSample& s) { return build_stance_query(s.belief, s.argument); }

AlignmentQuery build_query(const ChoiceSample& s) { return build_choice_query(s.premise, s.alt1, s.alt2); }

// ---------------------------------------------------------------------------
// ConceptLinker

ConceptLinker::ConceptLinker(const KnowledgeGraph& graph, const Lexicon& lexicon)
    : graph_(&graph), lexicon_(&lexicon), lemmatizer_(lexicon) {}

void ConceptLinker::build_lemma_index() const {
    lemma_index_.reserve(graph_->node_count() / 4);
    std::string lemma;
    for (std::uint32_t i = 0; i < graph_->node_count(); ++i) {
        const auto label = graph_->label(ConceptId{i});
        lemma.clear();
        std::size_t pos = 0;
        while (pos <= label.size()) {
            auto sp = label.find(' ', pos);
            if (sp == std::string_view::npos) sp = label.size();
            if (!lemma.empty()) lemma.push_back(' ');
            lemma += lemmatizer_.lemmatize(label.substr(pos, sp - pos));
            pos = sp + 1;
        }
        // Only forms that differ from the label itself; ties keep the lowest id.
        if (lemma != label) lemma_index_.try_emplace(lemma, i);
    }
}

std::optional<ConceptId> ConceptLinker::match(std::string_view surface, std::string_view lemma) const {
    if (auto id = graph_->find(surface)) return id;
    if (auto id = graph_->find(lemma)) return id;
    auto it = lemma_index_.find(std::string(lemma));
    if (it != lemma_index_.end()) return ConceptId{it->second};
    return std::nullopt;
}

ConceptSet ConceptLinker::link_basic(std::string_view text, Side side) const {
    ConceptSet out{side, {}};
    const auto tokens = tokenize(text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto id = graph_->find(tokens[i].text);
        if (!id) continue;
        const bool seen = std::any_of(out.concepts.begin(), out.concepts.end(),
                                      [&](const LinkedConcept& c) { return c.id == *id; });
        if (!seen) out.concepts.push_back(LinkedConcept{*id, tokens[i].span, i, 1, tokens[i].text});
    }
    return out;
}

ConceptSet ConceptLinker::link_enhanced(std::string_view text, std::size_t max_ngram, Side side) const {
    if (max_ngram == 0) throw ValidationError("max_ngram must be >= 1");
    std::call_once(lemma_once_, [this] { build_lemma_index(); });

    const auto tokens = tokenize(text);
    std::vector<std::string> lemmas;
    std::vector<bool> stop;
    lemmas.reserve(tokens.size());
    for (const auto& t : tokens) {
        lemmas.push_back(lemmatizer_.lemmatize(t.text));
        stop.push_back(lexicon_->is_stop_word(t.text));
    }

    std::vector<LinkedConcept> matches;
    std::string surface;
    std::string lemma;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        surface.clear();
        lemma.clear();
        bool all_stop = true;
        for (std::size_t n = 1; n <= max_ngram && i + n <= tokens.size(); ++n) {
            const std::size_t j = i + n - 1;
            if (n > 1) {
                surface.push_back(' ');
                lemma.push_back(' ');
            }
            surface += tokens[j].text;
            lemma += lemmas[j];
            all_stop = all_stop && stop[j];
            if (all_stop) continue;
            if (auto id = match(surface, lemma)) {
                matches.push_back(LinkedConcept{*id, TextSpan{tokens[i].span.begin, tokens[j].span.end}, i, n,
                                                std::string(graph_->label(*id))});
            }
        }
    }

    // Longest match first, then leftmost; accept only non-overlapping ones.
    std::stable_sort(matches.begin(), matches.end(), [](const auto& a, const auto& b) {
        if (a.token_count != b.token_count) return a.token_count > b.token_count;
        return a.first_token < b.first_token;
    });
    std::vector<bool> taken(tokens.size(), false);
    std::vector<LinkedConcept> accepted;
    for (auto& m : matches) {
        const auto first = taken.begin() + static_cast<std::ptrdiff_t>(m.first_token);
        const auto last = first + static_cast<std::ptrdiff_t>(m.token_count);
        if (std::any_of(first, last, [](bool t) { return t; })) continue;
        std::fill(first, last, true);
        accepted.push_back(std::move(m));
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const auto& a, const auto& b) { return a.first_token < b.first_token; });

    ConceptSet out{side, {}};
    for (auto& m : accepted) {
        const bool seen = std::any_of(out.concepts.begin(), out.concepts.end(),
                                      [&](const LinkedConcept& c) { return c.id == m.id; });
        if (!seen) out.concepts.push_back(std::move(m));
    }
    return out;
}

ConceptSet link_basic(std::string_view text, const KnowledgeGraph& graph) {
    return ConceptLinker(graph).link_basic(text);
}

ConceptSet link_enhanced(std::string_view text, const KnowledgeGraph& graph, std::size_t max_ngram) {
    return ConceptLinker(graph).link_enhanced(text, max_ngram);
}

}  // namespace kgalign
