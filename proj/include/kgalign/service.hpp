#pragma once
// Read-only HTTP service over a loaded graph.
//
//   GET  /health -> {"status": "ok", "node_count": n, "edge_count": m}
//   POST /align  -> one align record (same bytes as the batch CLI)
//
// Malformed requests get 400, backend failures 502.

#include "kgalign/pipeline.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace kgalign {

struct HttpResponse {
    int status = 200;
    std::string body;
};

class AlignService {
public:
    explicit AlignService(const Aligner& aligner) : aligner_(&aligner) {}

    HttpResponse health() const;
    HttpResponse align(std::string_view request_body) const;

private:
    const Aligner* aligner_;
};

/// Parses an /align request body into a sample and the approach to run.
/// Throws ValidationError describing the first problem found.
std::pair<Sample, Approach> parse_align_request(std::string_view body, Approach default_approach);

/// Serializes a sample into the request body parse_align_request accepts.
std::string make_align_request(const Sample& sample, Approach approach);

/// Runs the service on a background thread until stop() or destruction.
class HttpServer {
public:
    HttpServer(const AlignService& service, const std::string& host, int port);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    int port() const noexcept;
    void stop();
    /// Blocks until the server stops.
    void wait();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace kgalign
