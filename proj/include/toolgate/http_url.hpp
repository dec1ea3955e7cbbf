#pragma once

#include <string>

#include "toolgate/errors.hpp"

namespace toolgate {

/// Minimal split of "http(s)://host[:port][/path]" for cpp-httplib clients.
struct HttpUrl {
    std::string scheme = "http";
    std::string host;
    int port = 80;
    std::string path = "/";

    std::string scheme_host_port() const {
        return scheme + "://" + host + ":" + std::to_string(port);
    }
};

inline HttpUrl parse_http_url(const std::string& url, const std::string& default_path) {
    HttpUrl out;
    std::string rest = url;
    auto scheme_pos = rest.find("://");
    if (scheme_pos != std::string::npos) {
        out.scheme = rest.substr(0, scheme_pos);
        rest = rest.substr(scheme_pos + 3);
    }
    if (out.scheme != "http" && out.scheme != "https") {
        throw Error(ErrorCode::InvalidArgument, "unsupported URL scheme in " + url);
    }
    out.port = out.scheme == "https" ? 443 : 80;

    auto path_pos = rest.find('/');
    std::string authority = path_pos == std::string::npos ? rest : rest.substr(0, path_pos);
    out.path = path_pos == std::string::npos ? default_path : rest.substr(path_pos);
    if (out.path.empty() || out.path == "/") out.path = default_path;

    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        out.host = authority.substr(0, colon);
        try {
            out.port = std::stoi(authority.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad port in URL " + url);
        }
    } else {
        out.host = authority;
    }
    if (out.host.empty()) {
        throw Error(ErrorCode::InvalidArgument, "missing host in URL " + url);
    }
    return out;
}

}  // namespace toolgate
