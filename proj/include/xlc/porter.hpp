#pragma once

#include <string>
#include <string_view>

namespace xlc::porter {

/// Porter (1980) suffix-stripping stemmer. Expects a lower-case word; words
/// of two letters or fewer, and words containing anything other than a-z,
/// are returned unchanged.
std::string stem(std::string_view word);

}  // namespace xlc::porter
