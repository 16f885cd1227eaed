#pragma once

#include "sreview/error.hpp"
#include "sreview/venue.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace sreview {

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// HTTP status for a domain error: 404 for unknown resources, 409 for state
/// conflicts, 400 for malformed requests, 422 for everything else.
int http_status(ErrorCode code);

/// Request router over a VenueService. `target` is a path with an optional
/// query string; bodies are JSON.
class HttpApi {
public:
    explicit HttpApi(VenueService& service) : service_(service) {}

    HttpResponse handle(std::string_view method, std::string_view target, std::string_view body) const;

private:
    VenueService& service_;
};

/// Serves an HttpApi over TCP on a background thread.
class HttpServer {
public:
    explicit HttpServer(const HttpApi& api);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and starts listening; port 0 picks a free port. Returns the bound port.
    int start(const std::string& host, int port);
    /// Blocks serving requests until stop() is called from another thread.
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace sreview
