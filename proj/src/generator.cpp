#include "kgalign/generator.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace kgalign {

std::optional<GeneratorRequest> select_endpoints_linked(const ConceptSet& cs_q, const ConceptSet& cs_a) {
    if (cs_q.empty() || cs_a.empty()) return std::nullopt;
    const auto by_position = [](const LinkedConcept& x, const LinkedConcept& y) { return x.span.begin < y.span.begin; };
    const auto& first = *std::min_element(cs_q.concepts.begin(), cs_q.concepts.end(), by_position);
    const auto& last = *std::max_element(cs_a.concepts.begin(), cs_a.concepts.end(), by_position);
    return GeneratorRequest{first.matched, last.matched};
}

std::optional<GeneratorRequest> select_endpoints_gold(const GoldGraph& gold) {
    if (gold.empty()) return std::nullopt;
    GeneratorRequest req{normalize_label(gold.front().head), normalize_label(gold.back().tail)};
    if (req.start.empty() || req.end.empty()) return std::nullopt;
    return req;
}

namespace {

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string join_words(const std::vector<std::string_view>& words, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (!out.empty()) out.push_back(' ');
        out.append(words[i]);
    }
    return out;
}

TextTriple split_segment(std::string_view segment, const Lexicon& lexicon, bool& complete) {
    const auto words = split_words(segment);
    // Relations are sorted longest first, so the first hit at a position is
    // the longest one there. The head takes at least one word.
    for (std::size_t pos = 1; pos < words.size(); ++pos) {
        for (const auto& rel : lexicon.relations()) {
            const auto rel_words = split_words(rel);
            if (pos + rel_words.size() > words.size()) continue;
            bool hit = true;
            for (std::size_t w = 0; w < rel_words.size() && hit; ++w) hit = words[pos + w] == rel_words[w];
            if (!hit) continue;
            TextTriple t{join_words(words, 0, pos), rel, join_words(words, pos + rel_words.size(), words.size())};
            complete = complete && !t.head.empty() && !t.tail.empty();
            return t;
        }
    }
    complete = false;
    return TextTriple{join_words(words, 0, words.size()), "", ""};
}

}  // namespace

GeneratedPath parse_generated_path(std::string_view text, const Lexicon& lexicon) {
    GeneratedPath out;
    out.text = std::string(text);
    bool complete = true;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const auto segment = rest.substr(0, comma);
        if (!split_words(segment).empty()) out.segments.push_back(split_segment(segment, lexicon, complete));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (complete && !out.segments.empty()) out.parsed = out.segments;
    return out;
}

GeneratedPath StubGenerator::generate(const GeneratorRequest& req) const {
    return parse_generated_path(req.start + " related to " + req.end);
}

RemoteGenerator::RemoteGenerator(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

GeneratedPath RemoteGenerator::generate(const GeneratorRequest& req) const {
    using nlohmann::json;
    httplib::Client client(base_url_);
    const auto secs = static_cast<time_t>(timeout_seconds_);
    const auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    const std::string where =
        "generation service " + base_url_ + "/generate (start '" + req.start + "', end '" + req.end + "'): ";
    const json body = {{"start", req.start}, {"end", req.end}};
    auto res = client.Post("/generate", body.dump(), "application/json");
    if (!res) throw ProviderError(where + "request failed (" + httplib::to_string(res.error()) + ")");
    if (res->status != 200) throw ProviderError(where + "HTTP " + std::to_string(res->status));
    json j;
    try {
        j = json::parse(res->body);
    } catch (const json::parse_error&) {
        throw MalformedResponse(where + "response is not JSON", res->body);
    }
    if (!j.is_object() || !j.contains("path") || !j["path"].is_string()) {
        throw MalformedResponse(where + "response lacks string field 'path'", res->body);
    }
    return parse_generated_path(j["path"].get<std::string>());
}

}  // namespace kgalign
