#include "kgalign/errors.hpp"
#include "kgalign/pipeline.hpp"
#include "kgalign/quality.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace kgalign;
using nlohmann::json;

namespace {

std::vector<json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(json::parse(line));
    }
    return out;
}

}  // namespace

TEST_CASE("audit_triple") {
    CHECK(audit_triple({"gym", {"is a"}, ""}) == BrokenReason::missing_endpoint);
    CHECK(audit_triple({"a", {"is a", "part of"}, "b"}) == BrokenReason::multi_edge);
    CHECK_FALSE(audit_triple({"coffee", {"related to"}, "cafe"}));
    CHECK_FALSE(audit_triple({"coffee", {}, "cafe"}));
}

TEST_CASE("audit_sample") {
    CHECK(audit_sample({}) == BrokenReason::empty_result);
    const std::vector<TripleRecord> mixed = {{"coffee", {"related to"}, "cafe"}, {"gym", {"is a"}, ""}};
    CHECK(audit_sample(mixed) == BrokenReason::missing_endpoint);
    const std::vector<TripleRecord> good = {{"coffee", {"related to"}, "cafe"}, {"cafe", {"at location"}, "city"}};
    CHECK_FALSE(audit_sample(good));
}

TEST_CASE("broken-triple fixture suite") {
    const auto cases = read_jsonl(kgtest::fixtures() + "/broken_audit_cases.jsonl");
    REQUIRE(cases.size() == 12);
    std::set<std::string> reasons;
    for (const auto& c : cases) {
        CAPTURE(c["name"].get<std::string>());
        const auto got = audit_sample(sample_alignment_from_record(c).triples);
        if (c["expected"].is_null()) {
            CHECK_FALSE(got);
        } else {
            REQUIRE(got);
            CHECK(to_string(*got) == c["expected"].get<std::string>());
            reasons.insert(c["expected"].get<std::string>());
        }
    }
    CHECK(reasons.size() == 3);
}

TEST_CASE("broken reason names round-trip") {
    for (auto r : {BrokenReason::missing_endpoint, BrokenReason::multi_edge, BrokenReason::empty_result}) {
        CHECK(broken_reason_from_string(to_string(r)) == r);
    }
    CHECK_FALSE(broken_reason_from_string("nope"));
}

TEST_CASE("report on the bundled fixture matches the oracle") {
    const auto records = read_jsonl(kgtest::fixtures() + "/quality_records.jsonl");
    const auto expected = json::parse(kgtest::read_file(kgtest::fixtures() + "/quality_records.expected.json"));
    std::vector<SampleAlignment> samples;
    for (const auto& r : records) samples.push_back(sample_alignment_from_record(r));
    const HashedNgramEmbedder e;
    const auto rep = report(samples, "fixture", e);
    CHECK(rep.approach == "fixture");
    CHECK(rep.sample_count == expected["sample_count"].get<std::size_t>());
    CHECK(rep.avg_triples == expected["avg_triples"].get<double>());
    CHECK(rep.broken_fraction == expected["broken_fraction"].get<double>());
    CHECK(std::abs(rep.avg_similarity - expected["avg_similarity"].get<double>()) <= 1e-9);

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double want = expected["similarities"][i].get<double>();
        const double got = samples[i].linearized.empty()
                               ? 0.0
                               : cosine(e.embed(samples[i].context), e.embed(samples[i].linearized)).value;
        CHECK(std::abs(got - want) <= 1e-9);
    }
}

TEST_CASE("report invariants") {
    const HashedNgramEmbedder e;
    CHECK_THROWS_AS(report(std::vector<SampleAlignment>{}, "x", e), ValidationError);

    std::vector<SampleAlignment> empty(7);
    for (auto& s : empty) s.context = "some context";
    const auto rep = report(empty, "none", e);
    CHECK(rep.avg_triples == 0.0);
    CHECK(rep.broken_fraction == 1.0);
    CHECK(rep.avg_similarity == 0.0);

    const auto records = read_jsonl(kgtest::fixtures() + "/quality_records.jsonl");
    std::vector<SampleAlignment> samples;
    for (const auto& r : records) samples.push_back(sample_alignment_from_record(r));
    const auto base = report(samples, "a", e);
    CHECK(base.broken_fraction >= 0.0);
    CHECK(base.broken_fraction <= 1.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(samples.begin(), samples.end(), rng);
        const auto r = report(samples, "a", e);
        CHECK(r.avg_triples == base.avg_triples);
        CHECK(r.broken_fraction == base.broken_fraction);
        CHECK(r.avg_similarity == base.avg_similarity);
    }
}

TEST_CASE("renderers") {
    const std::vector<QualityReport> reports = {{"gold", 10, 2.12, 0.0, 0.5}, {"enhanced", 10, 3.5, 0.25, 0.31234}};
    const auto table = render_table(reports);
    CHECK(table.find("Avg. number of triples") != std::string::npos);
    CHECK(table.find("25.00") != std::string::npos);
    CHECK(table.find("0.31") != std::string::npos);

    const auto tsv = render_tsv(reports);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 3);
    CHECK(tsv.find("enhanced\t10\t") != std::string::npos);

    const auto jsonl = render_jsonl(reports);
    std::istringstream in(jsonl);
    std::string line;
    std::getline(in, line);
    const auto j = json::parse(line);
    CHECK(j["approach"] == "gold");
    CHECK(j["avg_triples"].get<double>() == 2.12);
}
