#include "kgalign/generator.hpp"
#include "kgalign/pruner.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <thread>

using namespace kgalign;
using nlohmann::json;

namespace {

ConceptSet concepts(std::initializer_list<const char*> labels) {
    ConceptSet s;
    std::size_t pos = 0;
    std::uint32_t id = 0;
    for (const auto* l : labels) {
        const std::size_t len = std::string_view(l).size();
        s.concepts.push_back(LinkedConcept{ConceptId{id++}, TextSpan{pos, pos + len}, pos, 1, l});
        pos += len + 1;
    }
    return s;
}

class FakeGenerateService {
public:
    explicit FakeGenerateService(httplib::Server::Handler handler) {
        server_.Post("/generate", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeGenerateService() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace

TEST_CASE("select_endpoints_linked") {
    const auto req = select_endpoints_linked(concepts({"bodybuilder", "lift weights"}), concepts({"bodybuilder", "muscle"}));
    REQUIRE(req);
    CHECK(*req == GeneratorRequest{"bodybuilder", "muscle"});
    CHECK_FALSE(select_endpoints_linked(ConceptSet{}, concepts({"a"})));
    CHECK_FALSE(select_endpoints_linked(concepts({"a"}), ConceptSet{}));
    CHECK(*select_endpoints_linked(concepts({"a"}), concepts({"b"})) == GeneratorRequest{"a", "b"});

    // Order inside the set does not matter, text positions do.
    auto q = concepts({"bodybuilder", "lift weights"});
    auto a = concepts({"bodybuilder", "muscle"});
    std::swap(q.concepts[0], q.concepts[1]);
    std::swap(a.concepts[0], a.concepts[1]);
    CHECK(*select_endpoints_linked(q, a) == GeneratorRequest{"bodybuilder", "muscle"});
}

TEST_CASE("select_endpoints_gold") {
    const GoldGraph gold = {{"man", "feels", "ashamed"}, {"makeup", "used for", "hide scar"}};
    CHECK(*select_endpoints_gold(gold) == GeneratorRequest{"man", "hide scar"});
    CHECK(*select_endpoints_gold({{"a", "r", "b"}}) == GeneratorRequest{"a", "b"});
    CHECK_FALSE(select_endpoints_gold({}));
    CHECK(*select_endpoints_gold({{"Hide_Scar ", "r", "B."}}) == GeneratorRequest{"hide scar", "b"});
}

TEST_CASE("parse_generated_path") {
    const auto p = parse_generated_path("masking tape used for hide scar, masking tape is a makeup");
    REQUIRE(p.parsed);
    REQUIRE(p.parsed->size() == 2);
    CHECK((*p.parsed)[0].head == "masking tape");
    CHECK((*p.parsed)[0].relation == "used for");
    CHECK((*p.parsed)[0].tail == "hide scar");
    CHECK((*p.parsed)[1].relation == "is a");
    CHECK(linearize(*p.parsed) == p.text);

    const auto broken = parse_generated_path("masking tape used for, gibberish here");
    CHECK_FALSE(broken.parsed);
    REQUIRE(broken.segments.size() == 2);
    CHECK(broken.segments[0].head == "masking tape");
    CHECK(broken.segments[0].tail == "");
    CHECK(broken.segments[1].relation == "");

    CHECK_FALSE(parse_generated_path("").parsed);
    // Longest relation wins at the leftmost position.
    const auto longest = parse_generated_path("dog not capable of fly");
    REQUIRE(longest.parsed);
    CHECK((*longest.parsed)[0].relation == "not capable of");
}

TEST_CASE("stub generator") {
    const StubGenerator stub;
    const auto p = stub.generate({"masking tape", "makeup"});
    CHECK(p.text == "masking tape related to makeup");
    REQUIRE(p.parsed);
    REQUIRE(p.parsed->size() == 1);
    CHECK(linearize(*p.parsed) == p.text);
    CHECK(parse_generated_path(linearize(*p.parsed)).parsed->front().tail == "makeup");
}

TEST_CASE("remote generator") {
    json seen;
    FakeGenerateService svc([&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        res.set_content(R"({"path": "masking tape used for hide scar, masking tape is a makeup"})", "application/json");
    });
    const RemoteGenerator gen(svc.url(), 5.0);
    const auto p = gen.generate({"masking tape", "makeup"});
    CHECK(seen == json{{"start", "masking tape"}, {"end", "makeup"}});
    REQUIRE(p.parsed);
    CHECK(p.parsed->size() == 2);
}

TEST_CASE("remote generator failures") {
    SUBCASE("malformed response keeps the raw body") {
        FakeGenerateService svc([](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html>oops</html>", "text/html");
        });
        try {
            RemoteGenerator(svc.url(), 5.0).generate({"a", "b"});
            FAIL("expected MalformedResponse");
        } catch (const MalformedResponse& e) {
            CHECK(e.raw() == "<html>oops</html>");
            CHECK(std::string(e.what()).find("start 'a'") != std::string::npos);
        }
    }
    SUBCASE("missing path field") {
        FakeGenerateService svc([](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"paths": []})", "application/json");
        });
        CHECK_THROWS_AS(RemoteGenerator(svc.url(), 5.0).generate({"a", "b"}), MalformedResponse);
    }
    SUBCASE("server error") {
        FakeGenerateService svc([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
        CHECK_THROWS_AS(RemoteGenerator(svc.url(), 5.0).generate({"a", "b"}), ProviderError);
    }
    SUBCASE("timeout") {
        FakeGenerateService svc([](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(600));
            res.set_content(R"({"path": "a related to b"})", "application/json");
        });
        CHECK_THROWS_AS(RemoteGenerator(svc.url(), 0.2).generate({"a", "b"}), ProviderError);
    }
}
