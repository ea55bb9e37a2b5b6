#include "xlc/metrics.hpp"

#include "xlc/error.hpp"
#include "xlc/porter.hpp"
#include "xlc/text.hpp"

#include <algorithm>
#include <cmath>

namespace xlc::metrics {

namespace {

using Gram = std::span<const std::string>;

/// All n-grams of `tokens`, sorted lexicographically.
std::vector<Gram> sorted_ngrams(Tokens tokens, std::size_t n) {
    std::vector<Gram> grams;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) grams.push_back(tokens.subspan(i, n));
    std::sort(grams.begin(), grams.end(), [](Gram a, Gram b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    return grams;
}

int compare(Gram a, Gram b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (const int c = a[k].compare(b[k]); c != 0) return c;
    return 0;
}

/// Sum over distinct candidate n-grams of min(count in candidate, count in reference).
std::size_t clipped_matches(Tokens candidate, Tokens reference, std::size_t n) {
    const auto cand = sorted_ngrams(candidate, n);
    const auto ref = sorted_ngrams(reference, n);
    std::size_t matches = 0, i = 0, j = 0;
    while (i < cand.size() && j < ref.size()) {
        const int c = compare(cand[i], ref[j]);
        if (c < 0) {
            ++i;
        } else if (c > 0) {
            ++j;
        } else {
            std::size_t ci = i, rj = j;
            while (ci < cand.size() && compare(cand[ci], cand[i]) == 0) ++ci;
            while (rj < ref.size() && compare(ref[rj], ref[j]) == 0) ++rj;
            matches += std::min(ci - i, rj - j);
            i = ci;
            j = rj;
        }
    }
    return matches;
}

}  // namespace

double bleu4_smooth(Tokens candidate, Tokens reference) {
    const auto c = candidate.size();
    const auto r = reference.size();
    if (c == 0 || r == 0) return 0.0;

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const std::size_t matches = clipped_matches(candidate, reference, n);
        const std::size_t total = c >= n ? c - n + 1 : 0;
        double p;
        if (n >= 2 && matches == 0) p = 1.0 / static_cast<double>(total + 1);
        else p = static_cast<double>(matches) / static_cast<double>(total);
        if (p == 0.0) return 0.0;
        log_sum += std::log(p) / 4.0;
    }
    const double bp = c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
    return std::clamp(100.0 * bp * std::exp(log_sum), 0.0, 100.0);
}

double rouge_l(Tokens candidate, Tokens reference) {
    const auto c = candidate.size();
    const auto r = reference.size();
    if (c == 0 || r == 0) return 0.0;
    std::vector<std::size_t> prev(r + 1, 0), cur(r + 1, 0);
    for (std::size_t i = 1; i <= c; ++i) {
        for (std::size_t j = 1; j <= r; ++j)
            cur[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    const auto lcs = static_cast<double>(prev[r]);
    if (lcs == 0.0) return 0.0;
    const double p = lcs / static_cast<double>(c);
    const double rec = lcs / static_cast<double>(r);
    return 100.0 * (2.0 * p * rec / (p + rec));
}

Alignment meteor_alignment(Tokens candidate, Tokens reference) {
    constexpr auto none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> cand_to_ref(candidate.size(), none);
    std::vector<bool> ref_taken(reference.size(), false);

    const auto stage = [&](auto&& key) {
        std::vector<std::string> ck, rk;
        ck.reserve(candidate.size());
        rk.reserve(reference.size());
        for (const auto& t : candidate) ck.push_back(key(t));
        for (const auto& t : reference) rk.push_back(key(t));
        for (std::size_t i = 0; i < candidate.size(); ++i) {
            if (cand_to_ref[i] != none) continue;
            std::size_t pick = none;
            if (i > 0 && cand_to_ref[i - 1] != none) {
                const auto next = cand_to_ref[i - 1] + 1;
                if (next < reference.size() && !ref_taken[next] && rk[next] == ck[i]) pick = next;
            }
            for (std::size_t j = 0; pick == none && j < reference.size(); ++j)
                if (!ref_taken[j] && rk[j] == ck[i]) pick = j;
            if (pick != none) {
                cand_to_ref[i] = pick;
                ref_taken[pick] = true;
            }
        }
    };
    stage([](const std::string& t) { return t; });
    stage([](const std::string& t) { return porter::stem(t); });

    Alignment out;
    for (std::size_t i = 0; i < candidate.size(); ++i)
        if (cand_to_ref[i] != none) out.emplace_back(i, cand_to_ref[i]);
    return out;
}

std::size_t chunk_count(const Alignment& alignment) {
    std::size_t chunks = 0;
    for (std::size_t k = 0; k < alignment.size(); ++k) {
        const bool continues = k > 0 && alignment[k].first == alignment[k - 1].first + 1 &&
                               alignment[k].second == alignment[k - 1].second + 1;
        if (!continues) ++chunks;
    }
    return chunks;
}

double meteor(Tokens candidate, Tokens reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const auto alignment = meteor_alignment(candidate, reference);
    const auto m = static_cast<double>(alignment.size());
    if (m == 0.0) return 0.0;
    const double p = m / static_cast<double>(candidate.size());
    const double r = m / static_cast<double>(reference.size());
    const double fmean = p * r / (kMeteorAlpha * p + (1.0 - kMeteorAlpha) * r);
    const double frag = static_cast<double>(chunk_count(alignment)) / m;
    const double penalty = kMeteorGamma * std::pow(frag, kMeteorBeta);
    return std::clamp(100.0 * fmean * (1.0 - penalty), 0.0, 100.0);
}

namespace {

template <class F>
double on_text(std::string_view candidate, std::string_view reference, std::string* warning, const char* name, F f) {
    const auto c = text::tokenize(candidate);
    const auto r = text::tokenize(reference);
    if (c.empty() || r.empty()) {
        if (warning)
            *warning = std::string(name) + ": " + (c.empty() ? "candidate" : "reference") +
                       " has no tokens; scored 0";
        return 0.0;
    }
    return f(Tokens(c), Tokens(r));
}

}  // namespace

double bleu4_smooth(std::string_view candidate, std::string_view reference, std::string* warning) {
    return on_text(candidate, reference, warning, "BLEU", [](Tokens c, Tokens r) { return bleu4_smooth(c, r); });
}

double rouge_l(std::string_view candidate, std::string_view reference, std::string* warning) {
    return on_text(candidate, reference, warning, "ROUGE-L", [](Tokens c, Tokens r) { return rouge_l(c, r); });
}

double meteor(std::string_view candidate, std::string_view reference, std::string* warning) {
    return on_text(candidate, reference, warning, "METEOR", [](Tokens c, Tokens r) { return meteor(c, r); });
}

double semantic_cosine(const Embedding& candidate, const Embedding& reference) {
    if (candidate.size() != reference.size()) throw PreconditionError("embedding dimensions differ");
    return std::clamp(cosine(candidate, reference), 0.0, 1.0) * 100.0;
}

double semantic_cosine(std::string_view candidate, std::string_view reference, const Embedder& embedder) {
    const auto a = embedder.embed(candidate);
    const auto b = embedder.embed(reference);
    if (candidate == reference) return 100.0;
    return semantic_cosine(a, b);
}

TextScore score_text(std::string_view candidate, std::string_view reference, const Embedder& embedder,
                     std::vector<std::string>* warnings) {
    TextScore s;
    std::string w;
    const auto note = [&] {
        if (warnings && !w.empty()) warnings->push_back(w);
        w.clear();
    };
    s.bleu4 = bleu4_smooth(candidate, reference, &w);
    note();
    s.rouge_l_f = rouge_l(candidate, reference, &w);
    note();
    s.meteor = meteor(candidate, reference, &w);
    note();
    try {
        s.semantic_cosine = semantic_cosine(candidate, reference, embedder);
    } catch (const PreconditionError& e) {
        s.semantic_cosine = 0.0;
        if (warnings) warnings->push_back(std::string("Semantic: ") + e.what() + "; scored 0");
    }
    return s;
}

std::vector<AggregateRow> aggregate(std::span<const TextScore> scores) {
    if (scores.empty()) throw EvalError("cannot aggregate an empty score list");
    const auto row = [&](const char* name, double TextScore::*field) {
        double sum = 0.0;
        for (const auto& s : scores) sum += s.*field;
        const double mean = sum / static_cast<double>(scores.size());
        double sq = 0.0;
        for (const auto& s : scores) sq += (s.*field - mean) * (s.*field - mean);
        return AggregateRow{name, mean, std::sqrt(sq / static_cast<double>(scores.size()))};
    };
    return {row("BLEU", &TextScore::bleu4), row("METEOR", &TextScore::meteor), row("ROUGE", &TextScore::rouge_l_f),
            row("Semantic", &TextScore::semantic_cosine)};
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

BinaryScore binary_score(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    BinaryScore s;
    s.tp = tp;
    s.fp = fp;
    s.fn = fn;
    s.tn = tn;
    s.precision = ratio(tp, tp + fp);
    s.recall = ratio(tp, tp + fn);
    s.f1 = f1_of(s.precision, s.recall);
    return s;
}

BinaryScore dependency_f1(std::span<const RcaRunRecord> records, const std::map<std::string, bool>& truth) {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& r : records) {
        const auto it = truth.find(r.incident_id);
        if (it == truth.end()) throw EvalError("incident " + r.incident_id + " has no dependency-failure label");
        const bool predicted = r.ok() && r.predicted_dependency.value_or(false);
        if (predicted && it->second) ++tp;
        else if (predicted) ++fp;
        else if (it->second) ++fn;
        else ++tn;
    }
    return binary_score(tp, fp, fn, tn);
}

const ClassMetrics& ClassReport::at(std::string_view label) const {
    for (const auto& [name, m] : per_class)
        if (name == label) return m;
    throw ReferenceError(std::string(label), "class report");
}

ClassReport class_report(std::span<const MonitorRunRecord> records, const std::map<std::string, std::string>& truth,
                         std::span<const std::string> classes) {
    const auto index_of = [&](std::string_view label) -> std::size_t {
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i] == label) return i;
        return classes.size();
    };
    const auto k = classes.size();
    std::vector<std::size_t> tp(k, 0), predicted(k, 0), support(k, 0);
    ClassReport rep;
    std::size_t correct = 0;
    for (const auto& r : records) {
        const auto it = truth.find(r.monitor_id);
        if (it == truth.end()) throw EvalError("monitor " + r.monitor_id + " has no truth label");
        const auto t = index_of(it->second);
        if (t == k) throw EvalError("monitor " + r.monitor_id + " has truth label '" + it->second + "' outside the class set");
        ++support[t];
        ++rep.total;
        const auto p = r.ok() && r.predicted.predicted ? index_of(*r.predicted.predicted) : k;
        if (p == k) {
            ++rep.parse_failures;
            continue;
        }
        ++predicted[p];
        if (p == t) {
            ++tp[p];
            ++correct;
        }
    }

    double macro_p = 0, macro_r = 0, macro_f = 0, w_p = 0, w_r = 0, w_f = 0;
    std::size_t present = 0;
    for (std::size_t i = 0; i < k; ++i) {
        ClassMetrics m;
        m.support = support[i];
        m.predicted = predicted[i];
        m.precision = ratio(tp[i], predicted[i]);
        m.recall = ratio(tp[i], support[i]);
        m.f1 = f1_of(m.precision, m.recall);
        m.class_accuracy = m.recall;
        if (support[i] > 0) {
            ++present;
            macro_p += m.precision;
            macro_r += m.recall;
            macro_f += m.f1;
            const auto w = static_cast<double>(support[i]);
            w_p += w * m.precision;
            w_r += w * m.recall;
            w_f += w * m.f1;
        }
        rep.per_class.emplace_back(classes[i], m);
    }
    if (present > 0) {
        const auto n = static_cast<double>(present);
        rep.macro = {macro_p / n, macro_r / n, macro_f / n};
        const auto tot = static_cast<double>(rep.total);
        rep.weighted = {w_p / tot, w_r / tot, w_f / tot};
    }
    std::size_t predicted_total = rep.parse_failures;
    for (auto n : predicted) predicted_total += n;
    rep.micro.precision = ratio(correct, predicted_total);
    rep.micro.recall = ratio(correct, rep.total);
    rep.micro.f1 = f1_of(rep.micro.precision, rep.micro.recall);
    rep.overall_accuracy = ratio(correct, rep.total);
    return rep;
}

}  // namespace xlc::metrics
