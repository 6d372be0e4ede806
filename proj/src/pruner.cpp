#include "kgalign/pruner.hpp"

#include "kgalign/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace kgalign {

std::vector<TextTriple> to_text_triples(const KnowledgeGraph& graph, const Path& path) {
    std::vector<TextTriple> out;
    out.reserve(path.triples.size());
    for (const auto& t : path.triples) {
        out.push_back(TextTriple{std::string(graph.label(t.head)), t.relation.name, std::string(graph.label(t.tail))});
    }
    return out;
}

std::vector<TextTriple> to_text_triples(const KnowledgeGraph& graph, const Subgraph& sub) {
    std::vector<TextTriple> out;
    out.reserve(sub.edges.size());
    for (const auto& t : sub.edges) {
        out.push_back(TextTriple{std::string(graph.label(t.head)), t.relation.name, std::string(graph.label(t.tail))});
    }
    return out;
}

std::string linearize(std::span<const TextTriple> triples) {
    std::string out;
    for (const auto& t : triples) {
        if (!out.empty()) out += ", ";
        out += t.head;
        out += ' ';
        out += t.relation;
        out += ' ';
        out += t.tail;
    }
    return out;
}

std::string linearize(const KnowledgeGraph& graph, const Path& path) { return linearize(to_text_triples(graph, path)); }

std::string linearize(const KnowledgeGraph& graph, const Subgraph& sub) { return linearize(to_text_triples(graph, sub)); }

// ---------------------------------------------------------------------------

bool EmbeddingVector::is_zero() const noexcept {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

EmbeddingVector HashedNgramEmbedder::embed(std::string_view text) const {
    EmbeddingVector v;
    v.values.assign(kDim, 0.0);
    if (text.empty()) return v;

    std::string s;
    s.reserve(text.size() + 2);
    s.push_back(' ');
    for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    s.push_back(' ');

    for (std::size_t i = 0; i < s.size(); ++i) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::size_t n = 1; n <= kMaxN && i + n <= s.size(); ++n) {
            h ^= static_cast<unsigned char>(s[i + n - 1]);
            h *= 0x100000001b3ULL;
            if (n >= kMinN) v.values[h % kDim] += 1.0;
        }
    }
    double norm = 0.0;
    for (double x : v.values) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v.values) x /= norm;
    return v;
}

// ---------------------------------------------------------------------------

RemoteEmbedder::RemoteEmbedder(std::string base_url, std::size_t expected_dim, double timeout_seconds)
    : base_url_(std::move(base_url)), expected_dim_(expected_dim), timeout_seconds_(timeout_seconds) {}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
    const std::string t(text);
    return std::move(embed_batch(std::span<const std::string>(&t, 1)).front());
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
    using nlohmann::json;
    httplib::Client client(base_url_);
    const auto secs = static_cast<time_t>(timeout_seconds_);
    const auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    json body = {{"texts", json::array()}};
    for (const auto& t : texts) body["texts"].push_back(t);
    auto res = client.Post("/embed", body.dump(), "application/json");
    const std::string where = "embedding service " + base_url_ + "/embed: ";
    if (!res) throw ProviderError(where + "request failed (" + httplib::to_string(res.error()) + ")");
    if (res->status != 200) throw ProviderError(where + "HTTP " + std::to_string(res->status));

    json j;
    try {
        j = json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw ProviderError(where + "malformed JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_unsigned() || !j.contains("vectors") ||
        !j["vectors"].is_array()) {
        throw ProviderError(where + "response lacks 'dim' or 'vectors'");
    }
    const auto dim = j["dim"].get<std::size_t>();
    if (expected_dim_ != 0 && dim != expected_dim_) {
        throw ProviderError(where + "dim " + std::to_string(dim) + ", expected " + std::to_string(expected_dim_));
    }
    if (j["vectors"].size() != texts.size()) {
        throw ProviderError(where + "got " + std::to_string(j["vectors"].size()) + " vectors for " +
                            std::to_string(texts.size()) + " texts");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& vec : j["vectors"]) {
        if (!vec.is_array() || vec.size() != dim) throw ProviderError(where + "vector length differs from dim");
        EmbeddingVector v;
        v.values.reserve(dim);
        for (const auto& x : vec) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) throw ProviderError(where + "non-finite vector value");
            v.values.push_back(x.get<double>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------

Similarity cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("cosine of vectors with dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return Similarity{0.0, true};
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return Similarity{std::clamp(c, -1.0, 1.0), false};
}

std::vector<RankedText> rank_by_similarity(std::span<const std::string> texts, std::string_view context,
                                           const EmbeddingProvider& provider, std::size_t top_n) {
    if (top_n == 0) throw ValidationError("top_n must be >= 1");
    std::vector<RankedText> ranked;
    if (texts.empty()) return ranked;

    std::vector<std::string> batch;
    batch.reserve(texts.size() + 1);
    batch.emplace_back(context);
    batch.insert(batch.end(), texts.begin(), texts.end());
    const auto vectors = provider.embed_batch(batch);

    ranked.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) ranked.push_back(RankedText{i, cosine(vectors[0], vectors[i + 1]).value});
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    if (ranked.size() > top_n) ranked.resize(top_n);
    return ranked;
}

std::vector<ScoredPath> prune(const KnowledgeGraph& graph, const std::vector<Path>& candidates,
                              std::string_view context, const EmbeddingProvider& provider, std::size_t top_n) {
    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const auto& p : candidates) texts.push_back(linearize(graph, p));
    std::vector<ScoredPath> out;
    for (const auto& r : rank_by_similarity(texts, context, provider, top_n)) {
        out.push_back(ScoredPath{candidates[r.index], texts[r.index], r.score});
    }
    return out;
}

}  // namespace kgalign
