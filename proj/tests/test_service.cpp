#include "kgalign/cli.hpp"
#include "kgalign/errors.hpp"
#include "kgalign/service.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

using namespace kgalign;
using nlohmann::json;

namespace {

const KnowledgeGraph& coffee_graph() {
    static const auto g = ingest_file(kgtest::fixtures() + "/coffee_graph.tsv").graph;
    return g;
}

const char* kCoffeeRequest =
    R"({"task": "choice", "id": "c", "premise": "The women met for coffee",
        "alt1": "The cafe reopened in a new location", "alt2": "They wanted to catch up"})";

}  // namespace

TEST_CASE("parse_align_request") {
    const auto [stance, a] = parse_align_request(
        R"json({"task": "stance", "belief": "B", "argument": "A", "gold_graph": "(a; is a; b)"})json", Approach::basic);
    CHECK(a == Approach::basic);
    const auto& s = std::get<StanceSample>(stance);
    CHECK(s.id == "0");
    CHECK(s.gold_graph.size() == 1);

    const auto [choice, b] = parse_align_request(kCoffeeRequest, Approach::enhanced);
    CHECK(b == Approach::enhanced);
    CHECK(std::get<ChoiceSample>(choice).alt2 == "They wanted to catch up");

    CHECK(parse_align_request(R"({"task": "stance", "belief": "B", "argument": "A", "approach": "gold", "id": 7})",
                              Approach::enhanced)
              .second == Approach::gold);

    for (const char* bad : {"", "[]", "{oops", R"({"task": "poem"})", R"({"task": "stance", "belief": "B"})",
                            R"({"task": "stance", "belief": "B", "argument": 3})",
                            R"({"task": "stance", "belief": "B", "argument": "A", "approach": "best"})",
                            R"({"task": "stance", "belief": "B", "argument": "A", "stance": "maybe"})",
                            R"json({"task": "stance", "belief": "B", "argument": "A", "gold_graph": "(a; b)"})json",
                            R"({"task": "choice", "premise": "P", "alt1": "a", "alt2": "b", "correct": 3})",
                            R"({"task": "choice", "premise": "P", "alt1": "a", "alt2": "b", "gold_graphs": [{"graph": ""}]})"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_align_request(bad, Approach::enhanced), ValidationError);
    }
}

TEST_CASE("make_align_request round-trips the fixture samples") {
    auto samples = load_samples(kgtest::fixtures() + "/stance_samples.tsv");
    for (auto& s : load_samples(kgtest::fixtures() + "/choice_samples.jsonl")) samples.push_back(std::move(s));
    for (const auto& s : samples) {
        for (auto a : {Approach::enhanced, Approach::gold}) {
            const auto body = make_align_request(s, a);
            const auto [back, approach] = parse_align_request(body, Approach::none);
            CHECK(approach == a);
            CHECK(make_align_request(back, a) == body);
        }
    }
}

TEST_CASE("AlignService status codes") {
    const HashedNgramEmbedder e;
    const Aligner aligner(coffee_graph(), e, nullptr, {});
    const AlignService svc(aligner);

    const auto h = svc.health();
    CHECK(h.status == 200);
    const auto hj = json::parse(h.body);
    CHECK(hj["status"] == "ok");
    CHECK(hj["node_count"] == coffee_graph().node_count());
    CHECK(hj["edge_count"] == coffee_graph().edge_count());

    const auto ok = svc.align(kCoffeeRequest);
    CHECK(ok.status == 200);
    CHECK(ok.body == aligner.align(std::get<0>(parse_align_request(kCoffeeRequest, Approach::enhanced))).dump());

    const auto missing = svc.align(R"({"task": "choice", "alt1": "a", "alt2": "b"})");
    CHECK(missing.status == 400);
    CHECK(json::parse(missing.body)["error"].get<std::string>().find("premise") != std::string::npos);

    CHECK(svc.align(R"({"task": "choice", "premise": " ", "alt1": "a", "alt2": "b"})").status == 400);
    CHECK(svc.align(R"({"task": "choice", "premise": "P", "alt1": "a", "alt2": "b", "approach": "generated"})").status ==
          400);

    const RemoteEmbedder remote("http://127.0.0.1:" + std::to_string(kgtest::free_port()), 0, 1.0);
    const Aligner broken(coffee_graph(), remote, nullptr, {});
    const auto down = AlignService(broken).align(kCoffeeRequest);
    CHECK(down.status == 502);
    CHECK(json::parse(down.body).contains("error"));
}

TEST_CASE("HttpServer on an ephemeral port") {
    const HashedNgramEmbedder e;
    const Aligner aligner(coffee_graph(), e, nullptr, {});
    const AlignService svc(aligner);
    HttpServer server(svc, "127.0.0.1", 0);
    REQUIRE(server.port() > 0);

    httplib::Client client("127.0.0.1", server.port());
    const auto h = client.Get("/health");
    REQUIRE(h);
    CHECK(h->status == 200);
    CHECK(json::parse(h->body)["node_count"] == coffee_graph().node_count());

    const auto a = client.Post("/align", kCoffeeRequest, "application/json");
    REQUIRE(a);
    CHECK(a->status == 200);
    CHECK(a->body == svc.align(kCoffeeRequest).body);

    const auto bad = client.Post("/align", "{}", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    const auto nf = client.Get("/nope");
    REQUIRE(nf);
    CHECK(nf->status == 404);

    server.stop();
    server.wait();
    CHECK_FALSE(client.Get("/health"));
}

TEST_CASE("HttpServer reports a taken port") {
    const HashedNgramEmbedder e;
    const Aligner aligner(coffee_graph(), e, nullptr, {});
    const AlignService svc(aligner);
    HttpServer first(svc, "127.0.0.1", 0);
    CHECK_THROWS_AS(HttpServer(svc, "127.0.0.1", first.port()), Error);
}
