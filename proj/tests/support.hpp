#pragma once

#include "xlc/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(std::string_view tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& file, std::string_view content);
std::string read_text(const std::filesystem::path& file);

/// Directory holding the checked-in fixtures (fixtures/ at the repo root).
std::filesystem::path fixture_dir();

/// Builds a corpus from compact parts; timestamps default to the epoch.
xlc::Service service(std::string id, std::string name, std::string description = "");
xlc::Incident incident(std::string id, std::string service_id, std::string title, std::string summary,
                       std::optional<std::string> root_cause = std::nullopt, std::optional<bool> df = std::nullopt);

/// Small deterministic RNG helpers for property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
};

}  // namespace testing
