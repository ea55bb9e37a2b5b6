#pragma once

#include "xlc/llm.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace xlc::detail {

struct ParsedUrl {
    std::string origin;  ///< scheme://host[:port]
    std::string path;
};

/// Throws PreconditionError for anything that is not http:// or https://.
ParsedUrl parse_url(std::string_view url);

bool is_transient_status(int status) noexcept;

/// POSTs `body` as JSON with bearer auth, retrying per `config.retry`.
/// Throws ProviderError(status) once retries are exhausted or on a
/// non-transient status.
nlohmann::json post_json(const llm::RemoteConfig& config, const nlohmann::json& body);

}  // namespace xlc::detail
