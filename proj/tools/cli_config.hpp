#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xlc::cli {

/// Bad flag values, config keys or combinations; maps to exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Effective settings after layering defaults, config file, environment and
/// flags (later layers win).
class Config {
  public:
    static const std::vector<std::string>& keys();
    static const std::map<std::string, std::string>& defaults();

    /// Environment variable for a key: XLC_<KEY>, except endpoint and api_key,
    /// which read XLC_LLM_ENDPOINT and XLC_LLM_KEY.
    static std::string env_name(std::string_view key);

    Config();

    /// `key = value` lines; "#" starts a comment; values may be double-quoted.
    /// Throws UsageError naming the file and line for unknown keys or bad syntax.
    void apply_file(const std::filesystem::path& file);
    /// `getenv` is injectable for tests.
    void apply_environment(const std::function<const char*(const char*)>& getenv);
    void set(const std::string& key, std::string value, const std::string& source = "flag");

    const std::string& get(const std::string& key) const;
    std::size_t get_count(const std::string& key, std::size_t min = 0) const;

    /// Which layer supplied `key`: "default", "file", "env" or "flag".
    const std::string& source(const std::string& key) const;

    /// One `key = value  (source)` line per key, secrets redacted.
    std::string describe() const;

  private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> sources_;
};

/// Parses key=value text (config and synth spec files).
std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& file);

}  // namespace xlc::cli
