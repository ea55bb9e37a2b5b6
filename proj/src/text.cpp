#include "xlc/text.hpp"

#include <cctype>

namespace xlc::text {

char32_t next_codepoint(std::string_view s, std::size_t& pos) noexcept {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    const unsigned char lead = byte(pos);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        ++pos;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + len > s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const unsigned char c = byte(pos + i);
        if ((c & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    pos += len;
    return cp;
}

bool is_space_codepoint(char32_t cp) noexcept {
    switch (cp) {
        case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200B;
    }
}

namespace {

bool is_separator(char32_t cp) noexcept {
    if (cp < 0x80) return !std::isalnum(static_cast<int>(cp));
    if (is_space_codepoint(cp)) return true;
    // General punctuation, Latin-1 punctuation, CJK symbols
    if (cp >= 0x2010 && cp <= 0x2027) return true;
    if (cp >= 0x2030 && cp <= 0x205E) return true;
    if (cp >= 0x3001 && cp <= 0x3003) return true;
    switch (cp) {
        case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
        case 0xFFFD:
            return true;
        default:
            return false;
    }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view input) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < input.size()) {
        const std::size_t start = pos;
        const char32_t cp = next_codepoint(input, pos);
        if (is_separator(cp)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
            continue;
        }
        if (cp < 0x80)
            current.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
        else
            current.append(input.substr(start, pos - start));
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string collapse_whitespace(std::string_view input) {
    std::string out;
    out.reserve(input.size());
    bool pending_space = false;
    std::size_t pos = 0;
    while (pos < input.size()) {
        const std::size_t start = pos;
        const char32_t cp = next_codepoint(input, pos);
        if (is_space_codepoint(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.append(input.substr(start, pos - start));
    }
    return out;
}

std::string_view trim(std::string_view s) noexcept {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept {
    return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find('\n', start);
        if (end == std::string_view::npos) end = s.size();
        std::string_view line = s.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool at_end = i + 1 == s.size();
        if (!at_end && !std::isspace(static_cast<unsigned char>(s[i + 1]))) continue;
        const auto sentence = trim(s.substr(start, i + 1 - start));
        if (!sentence.empty()) out.emplace_back(sentence);
        start = i + 1;
    }
    const auto rest = trim(s.substr(std::min(start, s.size())));
    if (!rest.empty()) out.emplace_back(rest);
    return out;
}

std::string label_key(std::string_view label) {
    std::string out;
    bool pending = false;
    for (char c : trim(label)) {
        if (c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace xlc::text
