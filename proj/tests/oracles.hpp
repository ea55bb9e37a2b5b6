#pragma once

#include "xlc/retrieval.hpp"

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Seq = std::vector<std::string>;

/// Smoothed BLEU-4 by explicit positional n-gram enumeration and counting by scan.
double bleu4(const Seq& candidate, const Seq& reference);

/// ROUGE-L F1 with the LCS found by enumerating every candidate subsequence.
double rouge_l(const Seq& candidate, const Seq& reference);

/// METEOR from a separately written alignment pass and the formula as stated.
double meteor(const Seq& candidate, const Seq& reference);

/// Calls `visit(c, r)` once per pair of non-empty sequences with |c|, |r| <=
/// max_len over an alphabet of `alphabet` symbols, up to renaming of symbols:
/// the concatenation c + r introduces symbols in order "a", "b", "c", ...
/// Returns the number of pairs visited.
std::size_t for_each_pair_up_to_renaming(std::size_t max_len, std::size_t alphabet,
                                         const std::function<void(const Seq&, const Seq&)>& visit);

/// Full sort of naive-loop cosines, score desc then id asc, excluded ids removed.
std::vector<xlc::retrieval::Neighbor> exhaustive_top_k(const xlc::retrieval::Index& index,
                                                        const xlc::Embedding& query, std::size_t k,
                                                        const std::set<std::string>& exclude);

}  // namespace oracle
