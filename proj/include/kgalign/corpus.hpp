#pragma once
// Dataset samples, gold explanation graphs, resplitting and the sequence
// templates fed to a downstream classifier.

#include "kgalign/lexicon.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace kgalign {

/// String-level triple as written by annotators or a generator.
struct TextTriple {
    std::string head;
    std::string relation;
    std::string tail;

    friend bool operator==(const TextTriple&, const TextTriple&) = default;
};

using GoldGraph = std::vector<TextTriple>;

enum class Stance { support, counter };

struct StanceSample {
    std::string id;
    std::string belief;
    std::string argument;
    Stance stance = Stance::support;
    GoldGraph gold_graph;
};

struct RatedGraph {
    GoldGraph triples;
    std::vector<double> ratings;
};

struct ChoiceSample {
    std::string id;
    std::string premise;
    std::string alt1;
    std::string alt2;
    int correct = 1;  // 1 or 2
    std::vector<RatedGraph> gold_graphs;
};

struct GoldParse {
    GoldGraph triples;
    /// One message per triple whose relation is not in the vocabulary.
    std::vector<std::string> warnings;
};

/// Parses "(head; relation; tail)(head; relation; tail)...". Whitespace
/// around fields and between groups is ignored; field text is otherwise
/// kept verbatim. Throws ParseError (with byte offset) on unbalanced
/// parentheses or a group that does not have exactly three fields.
GoldParse parse_gold_graph(std::string_view serialized, const Lexicon& lexicon = Lexicon::bundled());

/// Inverse of parse_gold_graph for well-formed lists.
std::string render_gold_graph(const GoldGraph& graph);

/// Index of the graph with the highest mean rating; ties go to the lowest
/// index. Throws ValidationError when there is no graph or a graph has no
/// ratings.
std::size_t best_graph_index(const ChoiceSample& sample);
const GoldGraph& select_best_graph(const ChoiceSample& sample);

template <typename T>
struct Split {
    std::vector<T> train;
    std::vector<T> dev;
    std::vector<T> test;
};

/// Seeded Fisher-Yates permutation of [0, n). Identical on every platform.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Seeded shuffle, then cut at floor(0.8n) and floor(0.9n). Throws
/// ValidationError for n < 10.
Split<StanceSample> resplit_stance(std::vector<StanceSample> samples, std::uint64_t seed);

/// train = dev_samples; official test halved in order, the odd extra going
/// to test. Throws ValidationError when either list is empty.
Split<ChoiceSample> split_choice(std::vector<ChoiceSample> dev_samples, std::vector<ChoiceSample> test_samples);

struct LabelCounts {
    std::size_t support = 0;
    std::size_t counter = 0;
};
LabelCounts label_counts(const std::vector<StanceSample>& samples);

/// "<belief> <sep> <argument> <sep> <graph> <sep>"; an empty graph drops
/// the "<graph> <sep>" segment.
std::string format_stance(std::string_view belief, std::string_view argument, std::string_view graph_text,
                          std::string_view sep_token = "[SEP]");

/// "<premise> <graph> <sep> <alternative> <sep>"; an empty graph leaves
/// "<premise> <sep> <alternative> <sep>".
std::string format_choice(std::string_view premise, std::string_view graph_text, std::string_view alternative,
                          std::string_view sep_token = "[SEP]");

std::string_view to_string(Stance s);

/// Tab-separated stance samples: [id] belief argument stance gold_graph.
/// With four columns the id is the 0-based data row index. A first line
/// whose stance column reads "stance" is treated as a header.
std::vector<StanceSample> read_stance_tsv(std::istream& in, const Lexicon& lexicon = Lexicon::bundled());
std::vector<StanceSample> load_stance_tsv(const std::filesystem::path& path);

/// JSON-lines choice samples:
/// {"id", "premise", "alt1", "alt2", "correct", "gold_graphs": [{"graph", "ratings"}]}
std::vector<ChoiceSample> read_choice_jsonl(std::istream& in, const Lexicon& lexicon = Lexicon::bundled());
std::vector<ChoiceSample> load_choice_jsonl(const std::filesystem::path& path);

}  // namespace kgalign
