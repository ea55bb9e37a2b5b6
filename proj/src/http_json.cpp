#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "http_json.hpp"

#include "xlc/error.hpp"

#include <httplib.h>

#include <thread>

namespace xlc::detail {

ParsedUrl parse_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) throw PreconditionError("endpoint URL lacks a scheme: " + std::string(url));
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw PreconditionError("unsupported endpoint scheme: " + std::string(scheme));
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string_view::npos) {
        out.origin = std::string(url);
        out.path = "/";
    } else {
        out.origin = std::string(url.substr(0, path_start));
        out.path = std::string(url.substr(path_start));
    }
    if (out.origin.size() <= scheme_end + 3) throw PreconditionError("endpoint URL lacks a host: " + std::string(url));
    return out;
}

bool is_transient_status(int status) noexcept { return status == 0 || status == 408 || status == 429 || status >= 500; }

nlohmann::json post_json(const llm::RemoteConfig& config, const nlohmann::json& body) {
    if (config.endpoint.empty()) throw PreconditionError("remote endpoint not configured (set XLC_LLM_ENDPOINT)");
    const auto url = parse_url(config.endpoint);
    const auto payload = body.dump();
    httplib::Headers headers;
    if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

    const int attempts = std::max(1, config.retry.max_attempts);
    int last_status = 0;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            const auto delay = config.retry.delay_before(attempt);
            if (config.retry.sleep)
                config.retry.sleep(delay);
            else
                std::this_thread::sleep_for(delay);
        }
        httplib::Client client(url.origin);
        client.set_connection_timeout(config.timeout);
        client.set_read_timeout(config.timeout);
        client.set_write_timeout(config.timeout);
        const auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_status = 0;
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::parse_error& e) {
                throw ProviderError(res->status, std::string("response is not JSON: ") + e.what());
            }
        }
        last_status = res->status;
        last_error = res->body.substr(0, 512);
        if (!is_transient_status(res->status)) break;
    }
    throw ProviderError(last_status, last_error.empty() ? "request failed" : last_error);
}

}  // namespace xlc::detail
