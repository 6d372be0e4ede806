#include "kgalign/quality.hpp"

#include "kgalign/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace kgalign {

std::string_view to_string(BrokenReason r) {
    switch (r) {
        case BrokenReason::missing_endpoint: return "missing_endpoint";
        case BrokenReason::multi_edge: return "multi_edge";
        case BrokenReason::empty_result: return "empty_result";
    }
    return "unknown";
}

std::optional<BrokenReason> broken_reason_from_string(std::string_view s) {
    if (s == "missing_endpoint") return BrokenReason::missing_endpoint;
    if (s == "multi_edge") return BrokenReason::multi_edge;
    if (s == "empty_result") return BrokenReason::empty_result;
    return std::nullopt;
}

TripleRecord to_record(const TextTriple& t) {
    TripleRecord r{t.head, {}, t.tail};
    if (!t.relation.empty()) r.relations.push_back(t.relation);
    return r;
}

std::vector<TripleRecord> to_records(std::span<const TextTriple> triples) {
    std::vector<TripleRecord> out;
    out.reserve(triples.size());
    for (const auto& t : triples) out.push_back(to_record(t));
    return out;
}

std::optional<BrokenReason> audit_triple(const TripleRecord& t) {
    if (normalize_label(t.head).empty() || normalize_label(t.tail).empty()) return BrokenReason::missing_endpoint;
    std::set<std::string> distinct;
    for (const auto& r : t.relations) distinct.insert(normalize_label(r));
    if (distinct.size() > 1) return BrokenReason::multi_edge;
    return std::nullopt;
}

std::optional<BrokenReason> audit_sample(std::span<const TripleRecord> triples) {
    if (triples.empty()) return BrokenReason::empty_result;
    for (const auto& t : triples) {
        if (auto r = audit_triple(t)) return r;
    }
    std::map<std::pair<std::string, std::string>, std::set<std::string>> between;
    for (const auto& t : triples) {
        auto a = normalize_label(t.head);
        auto b = normalize_label(t.tail);
        if (b < a) std::swap(a, b);
        auto& rels = between[{std::move(a), std::move(b)}];
        for (const auto& r : t.relations) rels.insert(normalize_label(r));
        if (rels.size() > 1) return BrokenReason::multi_edge;
    }
    return std::nullopt;
}

QualityReport report(std::span<const SampleAlignment> samples, std::string_view approach,
                     const EmbeddingProvider& provider) {
    if (samples.empty()) throw ValidationError("quality report over zero samples");
    QualityReport rep;
    rep.approach = std::string(approach);
    rep.sample_count = samples.size();

    std::size_t triples = 0;
    std::size_t broken = 0;
    std::vector<double> sims;
    sims.reserve(samples.size());
    for (const auto& s : samples) {
        triples += s.triples.size();
        if (audit_sample(s.triples)) ++broken;
        if (s.linearized.empty()) {
            sims.push_back(0.0);
        } else {
            const std::string texts[] = {s.context, s.linearized};
            const auto v = provider.embed_batch(texts);
            sims.push_back(cosine(v[0], v[1]).value);
        }
    }
    // Summing in sorted order keeps the mean independent of sample order.
    std::sort(sims.begin(), sims.end());
    double sim_sum = 0.0;
    for (double x : sims) sim_sum += x;

    const auto n = static_cast<double>(samples.size());
    rep.avg_triples = static_cast<double>(triples) / n;
    rep.broken_fraction = static_cast<double>(broken) / n;
    rep.avg_similarity = sim_sum / n;
    return rep;
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace

std::string render_table(std::span<const QualityReport> reports) {
    const std::vector<std::string> header = {"Approach", "Samples", "Avg. number of triples", "Broken triples (%)",
                                             "Avg. similarity"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        rows.push_back({r.approach, std::to_string(r.sample_count), fixed(r.avg_triples, 2),
                        fixed(100.0 * r.broken_fraction, 2), fixed(r.avg_similarity, 2)});
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    const auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += "  ";
            // Left-align the name column, right-align numbers.
            const std::string pad(width[c] - row[c].size(), ' ');
            out += c == 0 ? row[c] + pad : pad + row[c];
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    emit(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
    for (const auto& row : rows) emit(row);
    return out;
}

std::string render_tsv(std::span<const QualityReport> reports) {
    std::string out = "approach\tsample_count\tavg_triples\tbroken_fraction\tavg_similarity\n";
    for (const auto& r : reports) {
        out += r.approach + '\t' + std::to_string(r.sample_count) + '\t' + fixed(r.avg_triples, 6) + '\t' +
               fixed(r.broken_fraction, 6) + '\t' + fixed(r.avg_similarity, 6) + '\n';
    }
    return out;
}

std::string render_jsonl(std::span<const QualityReport> reports) {
    std::string out;
    for (const auto& r : reports) {
        nlohmann::json j = {{"approach", r.approach},
                            {"sample_count", r.sample_count},
                            {"avg_triples", r.avg_triples},
                            {"broken_fraction", r.broken_fraction},
                            {"avg_similarity", r.avg_similarity}};
        out += j.dump() + '\n';
    }
    return out;
}

}  // namespace kgalign
