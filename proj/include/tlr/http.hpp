#pragma once

// Default HTTP transports backed by cpp-httplib. Kept in a separate header
// so library users (and tests) that inject their own transports never pull
// in the socket machinery.

#include <map>
#include <string>

#include <httplib.h>

#include "tlr/retrieval.hpp"

namespace tlr {

namespace detail {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    size_t path_start = scheme_end == std::string::npos
                            ? url.find('/')
                            : url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace detail

inline PostFn http_post_transport() {
    return [](const std::string& url, const std::string& body,
              const std::map<std::string, std::string>& headers) -> HttpResponse {
        detail::SplitUrl split = detail::split_url(url);
        httplib::Client client(split.origin);
        client.set_read_timeout(60, 0);
        httplib::Headers h;
        std::string content_type = "application/json";
        for (const auto& [key, value] : headers) {
            if (key == "Content-Type") {
                content_type = value;
            } else {
                h.emplace(key, value);
            }
        }
        auto res = client.Post(split.path, h, body, content_type);
        if (!res) return {0, "", false, httplib::to_string(res.error())};
        return {res->status, res->body, true, ""};
    };
}

inline GetFn http_get_transport() {
    return [](const std::string& url) -> HttpResponse {
        detail::SplitUrl split = detail::split_url(url);
        httplib::Client client(split.origin);
        client.set_read_timeout(60, 0);
        client.set_follow_location(true);
        auto res = client.Get(split.path);
        if (!res) return {0, "", false, httplib::to_string(res.error())};
        return {res->status, res->body, true, ""};
    };
}

}  // namespace tlr
