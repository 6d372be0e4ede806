#pragma once
// Endpoint selection for generated paths, and clients for the external
// path-generation service.

#include "kgalign/corpus.hpp"
#include "kgalign/errors.hpp"
#include "kgalign/lexicon.hpp"
#include "kgalign/linker.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgalign {

struct GeneratorRequest {
    std::string start;
    std::string end;

    friend bool operator==(const GeneratorRequest&, const GeneratorRequest&) = default;
};

struct GeneratedPath {
    std::string text;
    /// Present when every comma-separated segment split into a non-empty
    /// head, a known relation and a non-empty tail.
    std::optional<std::vector<TextTriple>> parsed;
    /// Best-effort split of every segment; missing parts are empty.
    std::vector<TextTriple> segments;
};

/// First concept of cs_q and last concept of cs_a, by text position.
/// nullopt when either set is empty.
std::optional<GeneratorRequest> select_endpoints_linked(const ConceptSet& cs_q, const ConceptSet& cs_a);

/// Head of the first gold triple and tail of the last one, normalized.
/// nullopt for an empty graph or an empty endpoint.
std::optional<GeneratorRequest> select_endpoints_gold(const GoldGraph& gold);

/// Splits "h r t, h r t, ..." using the relation vocabulary: in each
/// segment the leftmost relation occurrence (longest at that position)
/// separates head from tail.
GeneratedPath parse_generated_path(std::string_view text, const Lexicon& lexicon = Lexicon::bundled());

/// Raised when the generation service answers with an unusable body.
class MalformedResponse : public ProviderError {
public:
    MalformedResponse(const std::string& what, std::string raw) : ProviderError(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

class PathGenerator {
public:
    virtual ~PathGenerator() = default;
    virtual std::string name() const = 0;
    virtual GeneratedPath generate(const GeneratorRequest& req) const = 0;
};

/// "<start> related to <end>".
class StubGenerator final : public PathGenerator {
public:
    std::string name() const override { return "stub"; }
    GeneratedPath generate(const GeneratorRequest& req) const override;
};

/// POST /generate {"start", "end"} -> {"path"}.
class RemoteGenerator final : public PathGenerator {
public:
    explicit RemoteGenerator(std::string base_url, double timeout_seconds = 30.0);

    std::string name() const override { return "remote:" + base_url_; }
    GeneratedPath generate(const GeneratorRequest& req) const override;

private:
    std::string base_url_;
    double timeout_seconds_;
};

}  // namespace kgalign
