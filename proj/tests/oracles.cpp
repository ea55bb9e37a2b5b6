#include "oracles.hpp"

#include "xlc/porter.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

bool gram_equal(const Seq& a, std::size_t i, const Seq& b, std::size_t j, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k)
        if (a[i + k] != b[j + k]) return false;
    return true;
}

std::size_t occurrences(const Seq& hay, const Seq& gram_src, std::size_t at, std::size_t n) {
    std::size_t count = 0;
    for (std::size_t j = 0; j + n <= hay.size(); ++j)
        if (gram_equal(hay, j, gram_src, at, n)) ++count;
    return count;
}

}  // namespace

double bleu4(const Seq& c, const Seq& r) {
    if (c.empty() || r.empty()) return 0.0;
    double product = 1.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const std::size_t positions = c.size() >= n ? c.size() - n + 1 : 0;
        std::size_t clipped = 0;
        for (std::size_t i = 0; i < positions; ++i) {
            bool first = true;
            for (std::size_t e = 0; e < i && first; ++e) first = !gram_equal(c, e, c, i, n);
            if (!first) continue;
            clipped += std::min(occurrences(c, c, i, n), occurrences(r, c, i, n));
        }
        double p;
        if (clipped == 0 && n > 1)
            p = 1.0 / (static_cast<double>(positions) + 1.0);
        else
            p = static_cast<double>(clipped) / static_cast<double>(positions);
        if (p == 0.0) return 0.0;
        product *= p;
    }
    const double cl = static_cast<double>(c.size()), rl = static_cast<double>(r.size());
    const double bp = cl >= rl ? 1.0 : std::exp(1.0 - rl / cl);
    return 100.0 * bp * std::pow(product, 0.25);
}

double rouge_l(const Seq& c, const Seq& r) {
    if (c.empty() || r.empty()) return 0.0;
    std::size_t best = 0;
    for (unsigned mask = 1; mask < (1u << c.size()); ++mask) {
        const auto len = static_cast<std::size_t>(__builtin_popcount(mask));
        if (len <= best) continue;
        std::size_t j = 0;
        bool ok = true;
        for (std::size_t i = 0; i < c.size() && ok; ++i) {
            if (!(mask >> i & 1u)) continue;
            while (j < r.size() && r[j] != c[i]) ++j;
            if (j == r.size()) ok = false;
            else ++j;
        }
        if (ok) best = len;
    }
    if (best == 0) return 0.0;
    const double p = static_cast<double>(best) / static_cast<double>(c.size());
    const double rec = static_cast<double>(best) / static_cast<double>(r.size());
    return 100.0 * 2.0 * p * rec / (p + rec);
}

double meteor(const Seq& c, const Seq& r) {
    if (c.empty() || r.empty()) return 0.0;
    std::vector<long> align(c.size(), -1);
    std::vector<char> used(r.size(), 0);
    for (int stage = 0; stage < 2; ++stage) {
        const auto form = [stage](const std::string& t) { return stage == 0 ? t : xlc::porter::stem(t); };
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (align[i] >= 0) continue;
            const auto want = form(c[i]);
            long chosen = -1;
            if (i > 0 && align[i - 1] >= 0) {
                const auto adj = static_cast<std::size_t>(align[i - 1] + 1);
                if (adj < r.size() && !used[adj] && form(r[adj]) == want) chosen = static_cast<long>(adj);
            }
            if (chosen < 0) {
                const auto it = std::find_if(r.begin(), r.end(), [&, j = std::size_t{0}](const std::string& t) mutable {
                    return !used[j++] && form(t) == want;
                });
                if (it != r.end()) chosen = it - r.begin();
            }
            if (chosen >= 0) {
                align[i] = chosen;
                used[static_cast<std::size_t>(chosen)] = 1;
            }
        }
    }
    double m = 0.0, chunks = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (align[i] < 0) continue;
        m += 1.0;
        const bool joins = i > 0 && align[i - 1] >= 0 && align[i - 1] + 1 == align[i];
        if (!joins) chunks += 1.0;
    }
    if (m == 0.0) return 0.0;
    const double p = m / static_cast<double>(c.size());
    const double rec = m / static_cast<double>(r.size());
    const double fmean = 10.0 * p * rec / (rec + 9.0 * p);
    const double frag = chunks / m;
    return 100.0 * fmean * (1.0 - 0.5 * frag * frag * frag);
}

std::size_t for_each_pair_up_to_renaming(std::size_t max_len, std::size_t alphabet,
                                         const std::function<void(const Seq&, const Seq&)>& visit) {
    std::vector<std::string> symbols;
    for (std::size_t s = 0; s < alphabet; ++s) symbols.push_back(std::string(1, static_cast<char>('a' + s)));
    std::size_t visited = 0;
    Seq c, r;
    // Depth-first over the concatenation, restricted-growth on symbol index.
    std::function<void(std::size_t, std::size_t, std::size_t, std::size_t)> grow =
        [&](std::size_t clen, std::size_t rlen, std::size_t pos, std::size_t used) {
            const std::size_t total = clen + rlen;
            if (pos == total) {
                visit(c, r);
                ++visited;
                return;
            }
            auto& target = pos < clen ? c : r;
            for (std::size_t s = 0; s < std::min(used + 1, alphabet); ++s) {
                target.push_back(symbols[s]);
                grow(clen, rlen, pos + 1, std::max(used, s + 1));
                target.pop_back();
            }
        };
    for (std::size_t clen = 1; clen <= max_len; ++clen)
        for (std::size_t rlen = 1; rlen <= max_len; ++rlen) grow(clen, rlen, 0, 0);
    return visited;
}

std::vector<xlc::retrieval::Neighbor> exhaustive_top_k(const xlc::retrieval::Index& index,
                                                        const xlc::Embedding& query, std::size_t k,
                                                        const std::set<std::string>& exclude) {
    double qn = 0.0;
    for (Eigen::Index d = 0; d < query.size(); ++d) qn += query[d] * query[d];
    qn = std::sqrt(qn);
    std::vector<xlc::retrieval::Neighbor> all;
    for (const auto& e : index.entries()) {
        if (exclude.count(e.incident_id)) continue;
        double dot = 0.0, en = 0.0;
        for (Eigen::Index d = 0; d < query.size(); ++d) {
            dot += e.vector[d] * query[d];
            en += e.vector[d] * e.vector[d];
        }
        all.push_back({e.incident_id, qn == 0.0 ? 0.0 : dot / (qn * std::sqrt(en))});
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.score != b.score ? a.score > b.score : a.incident_id < b.incident_id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace oracle
