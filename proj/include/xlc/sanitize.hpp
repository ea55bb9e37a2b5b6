#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace xlc::sanitize {

enum class Removed { html_tag, image_tag, table_block, stack_trace_lines };
inline constexpr std::size_t kRemovedKinds = 4;

std::string_view to_string(Removed kind) noexcept;

/// What one cleaning pass removed. Character counts are in code points.
struct CleanReport {
    std::size_t input_chars = 0;
    std::size_t output_chars = 0;
    std::array<std::size_t, kRemovedKinds> removed{};

    std::size_t count(Removed kind) const noexcept { return removed[static_cast<std::size_t>(kind)]; }
};

struct CleanOptions {
    /// Longest run of stack-frame lines kept verbatim. Must be >= 1.
    std::size_t stack_trace_limit = 3;
};

struct CleanResult {
    std::string text;
    CleanReport report;
};

inline constexpr std::string_view kStackTraceElided = "[stack trace elided]";

/// Strips HTML and image tags (keeping inner text), drops <table> blocks
/// whole, truncates long stack traces, collapses whitespace. Idempotent.
CleanResult clean_text(std::string_view raw, const CleanOptions& options = {});

/// `at a.b.C(...)`, or a tab / four-space indent followed by `File ` or `at `.
bool is_stack_frame(std::string_view line);

}  // namespace xlc::sanitize
