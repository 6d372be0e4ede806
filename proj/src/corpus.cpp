#include "kgalign/corpus.hpp"

#include "kgalign/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <random>

namespace kgalign {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

constexpr double kMinRating = 0.0;
constexpr double kMaxRating = 5.0;

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

GoldParse parse_gold_graph(std::string_view s, const Lexicon& lexicon) {
    GoldParse out;
    std::size_t i = 0;
    while (true) {
        while (i < s.size() && is_space(s[i])) ++i;
        if (i == s.size()) break;
        if (s[i] != '(') throw ParseError("expected '('", i);
        const std::size_t open = i;
        std::size_t close = i + 1;
        while (close < s.size() && s[close] != ')' && s[close] != '(') ++close;
        if (close == s.size() || s[close] == '(') throw ParseError("unbalanced parentheses", open);

        std::vector<std::string_view> fields;
        std::string_view body = s.substr(open + 1, close - open - 1);
        while (true) {
            const auto semi = body.find(';');
            fields.push_back(trim(body.substr(0, semi)));
            if (semi == std::string_view::npos) break;
            body.remove_prefix(semi + 1);
        }
        if (fields.size() != 3) {
            throw ParseError("triple has " + std::to_string(fields.size()) + " fields, expected 3", open);
        }
        TextTriple t{std::string(fields[0]), std::string(fields[1]), std::string(fields[2])};
        if (!lexicon.is_relation(t.relation)) {
            out.warnings.push_back("unknown relation '" + t.relation + "' at offset " + std::to_string(open));
        }
        out.triples.push_back(std::move(t));
        i = close + 1;
    }
    return out;
}

std::string render_gold_graph(const GoldGraph& graph) {
    std::string out;
    for (const auto& t : graph) {
        out += '(';
        out += t.head;
        out += "; ";
        out += t.relation;
        out += "; ";
        out += t.tail;
        out += ')';
    }
    return out;
}

std::size_t best_graph_index(const ChoiceSample& sample) {
    if (sample.gold_graphs.empty()) throw ValidationError("sample " + sample.id + " has no gold graphs");
    std::size_t best = 0;
    double best_mean = 0.0;
    for (std::size_t i = 0; i < sample.gold_graphs.size(); ++i) {
        const auto& r = sample.gold_graphs[i].ratings;
        if (r.empty()) throw ValidationError("gold graph " + std::to_string(i) + " of sample " + sample.id + " has no ratings");
        double sum = 0.0;
        for (double v : r) sum += v;
        const double mean = sum / static_cast<double>(r.size());
        if (i == 0 || mean > best_mean) {
            best = i;
            best_mean = mean;
        }
    }
    return best;
}

const GoldGraph& select_best_graph(const ChoiceSample& sample) {
    return sample.gold_graphs[best_graph_index(sample)].triples;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    // mt19937_64 output is fixed by the standard; distributions are not, so
    // bounded draws use rejection sampling on the raw output.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do {
            r = rng();
        } while (r >= limit);
        std::swap(perm[i - 1], perm[r % bound]);
    }
    return perm;
}

Split<StanceSample> resplit_stance(std::vector<StanceSample> samples, std::uint64_t seed) {
    const std::size_t n = samples.size();
    if (n < 10) throw ValidationError("resplit needs at least 10 samples, got " + std::to_string(n));
    const auto perm = seeded_permutation(n, seed);
    const std::size_t cut_train = n * 8 / 10;
    const std::size_t cut_dev = n * 9 / 10;
    Split<StanceSample> out;
    out.train.reserve(cut_train);
    out.dev.reserve(cut_dev - cut_train);
    out.test.reserve(n - cut_dev);
    for (std::size_t i = 0; i < n; ++i) {
        auto& dst = i < cut_train ? out.train : (i < cut_dev ? out.dev : out.test);
        dst.push_back(std::move(samples[perm[i]]));
    }
    return out;
}

Split<ChoiceSample> split_choice(std::vector<ChoiceSample> dev_samples, std::vector<ChoiceSample> test_samples) {
    if (dev_samples.empty() || test_samples.empty()) throw ValidationError("split_choice needs non-empty dev and test");
    Split<ChoiceSample> out;
    out.train = std::move(dev_samples);
    const std::size_t half = test_samples.size() / 2;
    out.dev.assign(std::make_move_iterator(test_samples.begin()),
                   std::make_move_iterator(test_samples.begin() + static_cast<std::ptrdiff_t>(half)));
    out.test.assign(std::make_move_iterator(test_samples.begin() + static_cast<std::ptrdiff_t>(half)),
                    std::make_move_iterator(test_samples.end()));
    return out;
}

LabelCounts label_counts(const std::vector<StanceSample>& samples) {
    LabelCounts c;
    for (const auto& s : samples) (s.stance == Stance::support ? c.support : c.counter)++;
    return c;
}

std::string format_stance(std::string_view belief, std::string_view argument, std::string_view graph_text,
                          std::string_view sep) {
    std::string out;
    out.append(belief).append(" ").append(sep).append(" ").append(argument).append(" ").append(sep);
    if (!graph_text.empty()) out.append(" ").append(graph_text).append(" ").append(sep);
    return out;
}

std::string format_choice(std::string_view premise, std::string_view graph_text, std::string_view alternative,
                          std::string_view sep) {
    std::string out(premise);
    if (!graph_text.empty()) out.append(" ").append(graph_text);
    out.append(" ").append(sep).append(" ").append(alternative).append(" ").append(sep);
    return out;
}

std::string_view to_string(Stance s) { return s == Stance::support ? "support" : "counter"; }

// ---------------------------------------------------------------------------
// Loaders

namespace {

Stance parse_stance(std::string_view v, std::size_t line) {
    if (v == "support") return Stance::support;
    if (v == "counter") return Stance::counter;
    throw ValidationError("line " + std::to_string(line) + ": stance must be support or counter, got '" +
                          std::string(v) + "'");
}

}  // namespace

std::vector<StanceSample> read_stance_tsv(std::istream& in, const Lexicon& lexicon) {
    std::vector<StanceSample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        std::vector<std::string_view> cols;
        std::string_view rest = line;
        while (true) {
            const auto tab = rest.find('\t');
            cols.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        if (cols.size() != 4 && cols.size() != 5) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected 4 or 5 tab-separated columns, got " +
                                  std::to_string(cols.size()));
        }
        const std::size_t off = cols.size() == 5 ? 1 : 0;
        if (out.empty() && trim(cols[off + 2]) == "stance") continue;

        StanceSample s;
        s.id = off ? std::string(trim(cols[0])) : std::to_string(out.size());
        s.belief = std::string(trim(cols[off]));
        s.argument = std::string(trim(cols[off + 1]));
        if (s.belief.empty() || s.argument.empty()) {
            throw ValidationError("line " + std::to_string(line_no) + ": empty belief or argument");
        }
        s.stance = parse_stance(trim(cols[off + 2]), line_no);
        try {
            s.gold_graph = parse_gold_graph(cols[off + 3], lexicon).triples;
        } catch (const ParseError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<StanceSample> load_stance_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return read_stance_tsv(in);
}

std::vector<ChoiceSample> read_choice_jsonl(std::istream& in, const Lexicon& lexicon) {
    using nlohmann::json;
    std::vector<ChoiceSample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto where = "line " + std::to_string(line_no) + ": ";
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(where + e.what());
        }
        const auto need_string = [&](const char* key) {
            if (!j.contains(key) || !j[key].is_string() || trim(j[key].get<std::string>()).empty()) {
                throw ValidationError(where + "missing or empty field '" + key + "'");
            }
            return j[key].get<std::string>();
        };
        ChoiceSample s;
        if (j.contains("id")) {
            s.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
        } else {
            s.id = std::to_string(out.size());
        }
        s.premise = need_string("premise");
        s.alt1 = need_string("alt1");
        s.alt2 = need_string("alt2");
        if (!j.contains("correct") || !j["correct"].is_number_integer() ||
            (j["correct"].get<int>() != 1 && j["correct"].get<int>() != 2)) {
            throw ValidationError(where + "field 'correct' must be 1 or 2");
        }
        s.correct = j["correct"].get<int>();
        if (!j.contains("gold_graphs") || !j["gold_graphs"].is_array() || j["gold_graphs"].empty()) {
            throw ValidationError(where + "field 'gold_graphs' must be a non-empty array");
        }
        for (const auto& g : j["gold_graphs"]) {
            if (!g.contains("graph") || !g["graph"].is_string() || !g.contains("ratings") || !g["ratings"].is_array()) {
                throw ValidationError(where + "gold graph needs 'graph' and 'ratings'");
            }
            RatedGraph rg;
            try {
                rg.triples = parse_gold_graph(g["graph"].get<std::string>(), lexicon).triples;
            } catch (const ParseError& e) {
                throw ValidationError(where + e.what());
            }
            for (const auto& r : g["ratings"]) {
                if (!r.is_number() || r.get<double>() < kMinRating || r.get<double>() > kMaxRating) {
                    throw ValidationError(where + "ratings must be numbers in [0, 5]");
                }
                rg.ratings.push_back(r.get<double>());
            }
            s.gold_graphs.push_back(std::move(rg));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ChoiceSample> load_choice_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return read_choice_jsonl(in);
}

}  // namespace kgalign
