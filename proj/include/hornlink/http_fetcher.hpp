#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>

#include "hornlink/errors.hpp"
#include "hornlink/loader.hpp"

#ifdef HORNLINK_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace hornlink {

// Plain-text page fetcher over HTTP(S). Redirects are followed by hand so the
// limit is exact; bodies must come back as text.
class DefaultHttpFetcher : public HttpFetcher {
public:
  struct Config {
    std::chrono::milliseconds timeout{10000};
    int max_redirects = 3;
  };

  DefaultHttpFetcher() = default;
  explicit DefaultHttpFetcher(Config cfg) : cfg_(cfg) {}

  std::string get(const std::string& url) override {
    std::string current = url;
    for (int hops = 0; hops <= cfg_.max_redirects; ++hops) {
      auto [base, target] = split_url(current);
#ifndef HORNLINK_USE_OPENSSL
      if (has_prefix(base, "https://"))
        throw FetchError(url, "https support not built in");
#endif
      httplib::Client client(base);
      auto secs = static_cast<time_t>(cfg_.timeout.count() / 1000);
      auto usecs = static_cast<time_t>((cfg_.timeout.count() % 1000) * 1000);
      client.set_connection_timeout(secs, usecs);
      client.set_read_timeout(secs, usecs);
      client.set_follow_location(false);

      httplib::Headers headers{{"Accept", "text/plain"}};
      httplib::Result res = client.Get(target, headers);
      if (!res)
        throw FetchError(current, httplib::to_string(res.error()));

      int status = res->status;
      if (status == 301 || status == 302 || status == 303 || status == 307 ||
          status == 308) {
        std::string loc = res->get_header_value("Location");
        if (loc.empty())
          throw FetchError(current, "redirect without a Location header");
        current = loc[0] == '/' ? base + loc : loc;
        continue;
      }
      if (status != 200)
        throw FetchError(current, "HTTP status " + std::to_string(status));

      std::string ctype = res->get_header_value("Content-Type");
      if (!ctype.empty() && ctype.rfind("text/", 0) != 0)
        throw FetchError(current, "unsupported content type " + ctype);
      return res->body;
    }
    throw FetchError(url, "more than " + std::to_string(cfg_.max_redirects) +
                              " redirects");
  }

private:
  // scheme://host[:port]/path -> (scheme://host[:port], /path)
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
      throw FetchError(url, "malformed URL");
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
  }

  Config cfg_;
};

inline std::shared_ptr<HttpFetcher> make_default_http_fetcher(
    DefaultHttpFetcher::Config cfg = {}) {
  return std::make_shared<DefaultHttpFetcher>(cfg);
}

}  // namespace hornlink
