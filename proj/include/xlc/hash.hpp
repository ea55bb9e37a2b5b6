#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace xlc {

/// Version tag mixed into every prompt hash. Bump when any template text changes.
inline constexpr std::string_view kTemplateVersion = "xlc-templates/1";

/// 64-bit FNV-1a. Stable across platforms and runs.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Lower-case, zero-padded, 16 hex digits.
std::string to_hex(std::uint64_t value);

/// Content hash of a prompt: FNV-1a over the template version, a newline, then the text.
std::uint64_t prompt_hash(std::string_view prompt_text) noexcept;

/// `to_hex(prompt_hash(text))`; used as the replay fixture key.
std::string prompt_hash_hex(std::string_view prompt_text);

}  // namespace xlc
