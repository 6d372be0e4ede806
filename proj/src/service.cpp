#include "kgalign/service.hpp"

#include "kgalign/errors.hpp"

#include <httplib.h>

#include <thread>

namespace kgalign {

using nlohmann::json;

namespace {

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw ValidationError(std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

std::string optional_id(const json& j) {
    if (!j.contains("id")) return "0";
    return j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
}

GoldGraph parse_gold_field(const json& value) {
    if (!value.is_string()) throw ValidationError("gold graph must be a string");
    try {
        return parse_gold_graph(value.get<std::string>()).triples;
    } catch (const ParseError& e) {
        throw ValidationError(std::string("gold graph: ") + e.what());
    }
}

json error_body(std::string_view message) { return json{{"error", message}}; }

}  // namespace

std::pair<Sample, Approach> parse_align_request(std::string_view body, Approach default_approach) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("request is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("request must be a JSON object");

    Approach approach = default_approach;
    if (j.contains("approach")) {
        const auto name = require_string(j, "approach");
        const auto a = approach_from_string(name);
        if (!a) throw ValidationError("unknown approach '" + name + "'");
        approach = *a;
    }

    const auto task = require_string(j, "task");
    if (task == "stance") {
        StanceSample s;
        s.id = optional_id(j);
        s.belief = require_string(j, "belief");
        s.argument = require_string(j, "argument");
        if (j.contains("stance")) {
            const auto st = require_string(j, "stance");
            if (st != "support" && st != "counter") throw ValidationError("stance must be support or counter");
            s.stance = st == "support" ? Stance::support : Stance::counter;
        }
        if (j.contains("gold_graph")) s.gold_graph = parse_gold_field(j["gold_graph"]);
        return {Sample{std::move(s)}, approach};
    }
    if (task == "choice") {
        ChoiceSample s;
        s.id = optional_id(j);
        s.premise = require_string(j, "premise");
        s.alt1 = require_string(j, "alt1");
        s.alt2 = require_string(j, "alt2");
        if (j.contains("correct")) {
            if (!j["correct"].is_number_integer() || (j["correct"] != 1 && j["correct"] != 2)) {
                throw ValidationError("correct must be 1 or 2");
            }
            s.correct = j["correct"].get<int>();
        }
        if (j.contains("gold_graphs")) {
            if (!j["gold_graphs"].is_array()) throw ValidationError("gold_graphs must be an array");
            for (const auto& g : j["gold_graphs"]) {
                if (!g.is_object() || !g.contains("graph") || !g.contains("ratings") || !g["ratings"].is_array()) {
                    throw ValidationError("gold graph needs 'graph' and 'ratings'");
                }
                RatedGraph rg;
                rg.triples = parse_gold_field(g["graph"]);
                for (const auto& r : g["ratings"]) {
                    if (!r.is_number()) throw ValidationError("ratings must be numbers");
                    rg.ratings.push_back(r.get<double>());
                }
                s.gold_graphs.push_back(std::move(rg));
            }
        }
        return {Sample{std::move(s)}, approach};
    }
    throw ValidationError("task must be 'stance' or 'choice'");
}

std::string make_align_request(const Sample& sample, Approach approach) {
    json j;
    j["approach"] = to_string(approach);
    if (const auto* s = std::get_if<StanceSample>(&sample)) {
        j["task"] = "stance";
        j["id"] = s->id;
        j["belief"] = s->belief;
        j["argument"] = s->argument;
        j["stance"] = to_string(s->stance);
        j["gold_graph"] = render_gold_graph(s->gold_graph);
    } else {
        const auto& c = std::get<ChoiceSample>(sample);
        j["task"] = "choice";
        j["id"] = c.id;
        j["premise"] = c.premise;
        j["alt1"] = c.alt1;
        j["alt2"] = c.alt2;
        j["correct"] = c.correct;
        j["gold_graphs"] = json::array();
        for (const auto& g : c.gold_graphs) {
            j["gold_graphs"].push_back({{"graph", render_gold_graph(g.triples)}, {"ratings", g.ratings}});
        }
    }
    return j.dump();
}

HttpResponse AlignService::health() const {
    const auto& g = aligner_->graph();
    json j = {{"status", "ok"}, {"node_count", g.node_count()}, {"edge_count", g.edge_count()}};
    return {200, j.dump()};
}

HttpResponse AlignService::align(std::string_view request_body) const {
    Sample sample;
    Approach approach;
    try {
        std::tie(sample, approach) = parse_align_request(request_body, aligner_->config().approach);
    } catch (const ValidationError& e) {
        return {400, error_body(e.what()).dump()};
    }
    try {
        return {200, aligner_->align(sample, approach).dump()};
    } catch (const ProviderError& e) {
        return {502, error_body(e.what()).dump()};
    } catch (const ValidationError& e) {
        return {400, error_body(e.what()).dump()};
    } catch (const std::exception& e) {
        return {500, error_body(e.what()).dump()};
    }
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
    httplib::Server server;
    std::thread thread;
    int port = 0;
};

HttpServer::HttpServer(const AlignService& service, const std::string& host, int port) : impl_(std::make_unique<Impl>()) {
    auto& svr = impl_->server;
    // SO_REUSEADDR only: a second instance on the same port must fail to bind.
    svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    svr.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
        const auto r = service.health();
        res.status = r.status;
        res.set_content(r.body, "application/json");
    });
    svr.Post("/align", [&service](const httplib::Request& req, httplib::Response& res) {
        const auto r = service.align(req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    });
    if (port == 0) {
        impl_->port = svr.bind_to_any_port(host);
    } else {
        impl_->port = svr.bind_to_port(host, port) ? port : -1;
    }
    if (impl_->port < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    svr.wait_until_ready();
}

HttpServer::~HttpServer() {
    stop();
    wait();
}

int HttpServer::port() const noexcept { return impl_->port; }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace kgalign
