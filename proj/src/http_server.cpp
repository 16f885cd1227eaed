#include "sreview/http_api.hpp"

#include "httplib.h"

#include <thread>

namespace sreview {

struct HttpServer::Impl {
    const HttpApi& api;
    httplib::Server server;
    std::thread thread;

    explicit Impl(const HttpApi& a) : api(a)
    {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            std::string target = req.path;
            char sep = '?';
            for (const auto& [k, v] : req.params) {
                target += sep + httplib::detail::encode_query_param(k) + "=" + httplib::detail::encode_query_param(v);
                sep = '&';
            }
            auto out = api.handle(req.method, target, req.body);
            res.status = out.status;
            res.set_content(out.body, out.content_type.c_str());
        };
        server.Get(R"(/.*)", handler);
        server.Post(R"(/.*)", handler);
    }
};

HttpServer::HttpServer(const HttpApi& api) : impl_(std::make_unique<Impl>(api)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) bound = impl_->server.bind_to_any_port(host);
    else if (!impl_->server.bind_to_port(host, port)) bound = -1;
    if (bound < 0) throw Error(ErrorCode::InvalidConfig, "cannot listen on " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpServer::run(const std::string& host, int port)
{
    if (!impl_->server.listen(host, port))
        throw Error(ErrorCode::InvalidConfig, "cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop()
{
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace sreview
