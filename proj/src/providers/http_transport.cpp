// cpp-httplib lives in its own translation unit; it is expensive to compile.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "recoding/error.hpp"
#include "recoding/providers/http_client.hpp"

namespace recoding::providers {
namespace {

class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(const std::string& base_url) {
    // Split "scheme://host[:port][/prefix]".
    const auto scheme_end = base_url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = base_url.find('/', host_start);
    origin_ = base_url.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  HttpResponse post(const std::string& path, const std::string& body, const Headers& headers,
                    std::chrono::milliseconds timeout) override {
    httplib::Client client(origin_);
    const auto secs = timeout.count() / 1000;
    const auto usecs = (timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers h(headers.begin(), headers.end());
    h.erase("Content-Type");
    auto res = client.Post(prefix_ + path, h, body, "application/json");
    if (!res) {
      throw Error(ErrorCode::kRetryableTransport,
                  "transport failure (" + httplib::to_string(res.error()) + ") for " + origin_ +
                      prefix_ + path);
    }
    return HttpResponse{res->status, res->body};
  }

 private:
  std::string origin_;
  std::string prefix_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& base_url) {
  return std::make_unique<HttplibTransport>(base_url);
}

}  // namespace recoding::providers
