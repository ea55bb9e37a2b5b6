#include "xlc/hash.hpp"

namespace xlc {

std::string to_hex(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::uint64_t prompt_hash(std::string_view prompt_text) noexcept {
    std::uint64_t h = fnv1a64(kTemplateVersion);
    h = fnv1a64("\n", h);
    return fnv1a64(prompt_text, h);
}

std::string prompt_hash_hex(std::string_view prompt_text) { return to_hex(prompt_hash(prompt_text)); }

}  // namespace xlc
