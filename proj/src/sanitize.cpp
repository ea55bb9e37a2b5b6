#include "xlc/sanitize.hpp"

#include "xlc/error.hpp"
#include "xlc/text.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <vector>

namespace xlc::sanitize {

std::string_view to_string(Removed kind) noexcept {
    switch (kind) {
        case Removed::html_tag: return "html_tag";
        case Removed::image_tag: return "image_tag";
        case Removed::table_block: return "table_block";
        case Removed::stack_trace_lines: return "stack_trace_lines";
    }
    return "unknown";
}

namespace {

std::size_t count_codepoints(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t pos = 0; pos < s.size(); ++n) text::next_codepoint(s, pos);
    return n;
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':' || c == '_';
}

std::size_t find_icase(std::string_view hay, std::string_view needle, std::size_t from) {
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i)
        if (text::iequals(hay.substr(i, needle.size()), needle)) return i;
    return std::string_view::npos;
}

/// Position of an opening or closing `<table`/`</table` token at or after `from`.
std::size_t find_table_token(std::string_view s, std::size_t from, bool closing) {
    const std::string_view needle = closing ? "</table" : "<table";
    for (std::size_t pos = find_icase(s, needle, from); pos != std::string_view::npos;
         pos = find_icase(s, needle, pos + 1)) {
        const std::size_t after = pos + needle.size();
        if (after == s.size() || !is_name_char(s[after])) return pos;
    }
    return std::string_view::npos;
}

bool remove_tables(std::string& s, CleanReport& report) {
    bool changed = false;
    std::size_t start;
    while ((start = find_table_token(s, 0, false)) != std::string::npos) {
        int depth = 1;
        std::size_t cursor = start + 1;
        std::size_t end = s.size();
        while (depth > 0) {
            const auto open = find_table_token(s, cursor, false);
            const auto close = find_table_token(s, cursor, true);
            if (close == std::string::npos) break;  // unclosed: drop to end
            if (open != std::string::npos && open < close) {
                ++depth;
                cursor = open + 1;
                continue;
            }
            --depth;
            const auto gt = s.find('>', close);
            cursor = gt == std::string::npos ? s.size() : gt + 1;
            if (depth == 0) end = cursor;
        }
        s.replace(start, end - start, " ");
        ++report.removed[static_cast<std::size_t>(Removed::table_block)];
        changed = true;
    }
    return changed;
}

bool is_inline_tag(std::string_view name) {
    static constexpr std::string_view inline_tags[] = {"a",    "abbr", "b",     "code", "em",  "font", "i",
                                                       "mark", "s",    "small", "span", "strong", "sub",
                                                       "sup",  "u",    "tt",    "kbd",  "var"};
    return std::any_of(std::begin(inline_tags), std::end(inline_tags),
                       [&](std::string_view t) { return text::iequals(t, name); });
}

bool strip_tags(std::string& s, CleanReport& report) {
    std::string out;
    out.reserve(s.size());
    bool changed = false;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        const char next = i + 1 < s.size() ? s[i + 1] : '\0';
        // Markdown image: ![alt](target)
        if (c == '!' && next == '[') {
            const auto close_bracket = s.find("](", i + 2);
            const auto newline = s.find('\n', i + 2);
            if (close_bracket != std::string::npos && close_bracket < newline) {
                const auto close_paren = s.find(')', close_bracket + 2);
                if (close_paren != std::string::npos && close_paren < s.find('\n', close_bracket)) {
                    out.push_back(' ');
                    ++report.removed[static_cast<std::size_t>(Removed::image_tag)];
                    i = close_paren + 1;
                    changed = true;
                    continue;
                }
            }
        }
        const bool opens_tag = c == '<' && (std::isalpha(static_cast<unsigned char>(next)) || next == '/' || next == '!');
        if (!opens_tag) {
            out.push_back(c);
            ++i;
            continue;
        }
        changed = true;
        if (s.compare(i, 4, "<!--") == 0) {
            const auto end = s.find("-->", i + 4);
            i = end == std::string::npos ? s.size() : end + 3;
            out.push_back(' ');
            ++report.removed[static_cast<std::size_t>(Removed::html_tag)];
            continue;
        }
        std::size_t name_start = i + 1;
        while (name_start < s.size() && (s[name_start] == '/' || s[name_start] == '!')) ++name_start;
        std::size_t name_end = name_start;
        while (name_end < s.size() && is_name_char(s[name_end])) ++name_end;
        const std::string_view name(s.data() + name_start, name_end - name_start);

        const auto gt = s.find('>', i + 1);
        const auto lt = s.find('<', i + 1);
        std::size_t end;
        if (gt != std::string::npos && (lt == std::string::npos || gt < lt))
            end = gt + 1;
        else
            end = name_end;  // malformed: strip the tag token only

        const bool image = text::iequals(name, "img");
        ++report.removed[static_cast<std::size_t>(image ? Removed::image_tag : Removed::html_tag)];
        if (!is_inline_tag(name)) out.push_back(' ');
        i = end;
    }
    s = std::move(out);
    return changed;
}

std::string elide_stack_traces(std::string_view s, std::size_t limit, CleanReport& report) {
    const auto lines = text::split_lines(s);
    std::vector<std::string_view> kept;
    kept.reserve(lines.size());
    std::size_t i = 0;
    while (i < lines.size()) {
        if (!is_stack_frame(lines[i])) {
            kept.push_back(lines[i++]);
            continue;
        }
        std::size_t j = i;
        while (j < lines.size() && is_stack_frame(lines[j])) ++j;
        const std::size_t run = j - i;
        std::size_t elided_chars = 0;
        for (std::size_t k = i + limit; k < j; ++k) elided_chars += count_codepoints(lines[k]) + 1;
        // Only elide when the marker actually shortens the text.
        if (run > limit && elided_chars > kStackTraceElided.size() + 1) {
            for (std::size_t k = i; k < i + limit; ++k) kept.push_back(lines[k]);
            kept.push_back(kStackTraceElided);
            report.removed[static_cast<std::size_t>(Removed::stack_trace_lines)] += run - limit;
        } else {
            for (std::size_t k = i; k < j; ++k) kept.push_back(lines[k]);
        }
        i = j;
    }
    std::string out;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        if (k) out.push_back('\n');
        out.append(kept[k]);
    }
    return out;
}

}  // namespace

bool is_stack_frame(std::string_view line) {
    static const std::regex call_frame(R"(^\s*at\s+[A-Za-z_$][\w$.<>`+\[\],]*\s?\(.*\).*$)");
    static const std::regex indented_frame(R"(^(\t| {4})\s*(File |at ).*$)");
    const std::string l(line);
    return std::regex_match(l, call_frame) || std::regex_match(l, indented_frame);
}

CleanResult clean_text(std::string_view raw, const CleanOptions& options) {
    if (options.stack_trace_limit == 0) throw PreconditionError("stack_trace_limit must be at least 1");
    CleanResult result;
    result.report.input_chars = count_codepoints(raw);

    const auto pass = [&](std::string_view in) {
        std::string work(in);
        // Stripping can splice new tags together ("<<b>b>"); iterate to a fixpoint.
        while (remove_tables(work, result.report) | strip_tags(work, result.report)) {
        }
        work = elide_stack_traces(work, options.stack_trace_limit, result.report);
        return text::collapse_whitespace(work);
    };
    // Joining lines can form new markup ("![a\n](b)"). Every pass that changes
    // collapsed text shortens it, so this terminates.
    result.text = pass(raw);
    for (auto next = pass(result.text); next != result.text; next = pass(result.text)) result.text = std::move(next);
    result.report.output_chars = count_codepoints(result.text);
    return result;
}

}  // namespace xlc::sanitize
