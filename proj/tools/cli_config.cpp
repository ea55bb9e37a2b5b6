#include "cli_config.hpp"

#include "xlc/text.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace xlc::cli {

const std::vector<std::string>& Config::keys() {
    static const std::vector<std::string> k = {
        "corpus",   "out",         "index",      "provider", "fixtures",    "record",      "endpoint",
        "api_key",  "model",       "k",          "stack_limit", "concurrency", "embedder", "embed_endpoint",
        "embed_model", "embed_dim",
    };
    return k;
}

const std::map<std::string, std::string>& Config::defaults() {
    static const std::map<std::string, std::string> d = {
        {"corpus", "corpus"},    {"out", "runs"},       {"index", ""},           {"provider", "stub"},
        {"fixtures", "fixtures/replay"}, {"record", ""}, {"endpoint", ""},        {"api_key", ""},
        {"model", "gpt-4"},      {"k", "5"},            {"stack_limit", "3"},    {"concurrency", "4"},
        {"embedder", "hashing"}, {"embed_endpoint", ""}, {"embed_model", "text-embedding-ada-002"},
        {"embed_dim", "1536"},
    };
    return d;
}

std::string Config::env_name(std::string_view key) {
    if (key == "endpoint") return "XLC_LLM_ENDPOINT";
    if (key == "api_key") return "XLC_LLM_KEY";
    std::string out = "XLC_";
    for (char c : key) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

Config::Config() {
    for (const auto& [k, v] : defaults()) {
        values_[k] = v;
        sources_[k] = "default";
    }
}

std::map<std::string, std::string> parse_key_values(std::string_view textv, const std::string& file) {
    std::map<std::string, std::string> out;
    std::size_t n = 0;
    for (auto raw : text::split_lines(textv)) {
        ++n;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos && line.find('"') == std::string_view::npos)
            line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw UsageError(file + ":" + std::to_string(n) + ": expected 'key = value'");
        const auto key = std::string(text::trim(line.substr(0, eq)));
        auto value = text::trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw UsageError(file + ":" + std::to_string(n) + ": empty key");
        out[key] = std::string(value);
    }
    return out;
}

void Config::apply_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw UsageError("cannot read config file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto name = file.string();
    for (auto& [k, v] : parse_key_values(buf.str(), name)) {
        if (!values_.count(k)) throw UsageError(name + ": unknown config key '" + k + "'");
        set(k, std::move(v), "file");
    }
}

void Config::apply_environment(const std::function<const char*(const char*)>& getenv) {
    for (const auto& k : keys())
        if (const char* v = getenv(env_name(k).c_str())) set(k, v, "env");
}

void Config::set(const std::string& key, std::string value, const std::string& source) {
    if (!values_.count(key)) throw UsageError("unknown config key '" + key + "'");
    values_[key] = std::move(value);
    sources_[key] = source;
}

const std::string& Config::get(const std::string& key) const { return values_.at(key); }

std::size_t Config::get_count(const std::string& key, std::size_t min) const {
    const auto& v = get(key);
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw UsageError(key + " must be a non-negative integer, got '" + v + "'");
    if (out < min) throw UsageError(key + " must be at least " + std::to_string(min));
    return out;
}

const std::string& Config::source(const std::string& key) const { return sources_.at(key); }

std::string Config::describe() const {
    std::string out;
    for (const auto& k : keys()) {
        const auto& v = get(k);
        const bool secret = k == "api_key";
        out += k + " = " + (secret && !v.empty() ? std::string("<redacted>") : v) + "  (" + source(k) + ")\n";
    }
    return out;
}

}  // namespace xlc::cli
