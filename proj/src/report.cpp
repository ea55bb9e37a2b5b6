#include "xlc/report.hpp"

#include "xlc/error.hpp"
#include "xlc/sanitize.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace xlc::report {

using nlohmann::ordered_json;

namespace {

std::string reference_root_cause(const Incident& inc) {
    if (inc.clean_root_cause) return *inc.clean_root_cause;
    return sanitize::clean_text(*inc.ground_truth_root_cause).text;
}

std::string fixed(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    // Width in code points.
    std::size_t cps = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++cps;
    if (cps < width) s.append(width - cps, ' ');
    return s;
}

std::string rstrip(std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

}  // namespace

StrategyResult evaluate_rca(std::span<const RcaRunRecord> records, const Corpus& corpus, const Embedder& embedder,
                            std::vector<std::string>* warnings) {
    StrategyResult out;
    if (!records.empty()) out.strategy = records.front().strategy;
    out.records = records.size();

    std::map<std::string, bool> truth;
    std::vector<metrics::TextScore> scores, sd, nosd;
    for (const auto& r : records) {
        const auto* inc = corpus.find_incident(r.incident_id);
        if (!inc) throw EvalError("incident " + r.incident_id + " from the runs file is not in the corpus");
        if (!inc->is_dependency_failure)
            throw EvalError("incident " + r.incident_id + " has no dependency-failure label");
        truth[r.incident_id] = *inc->is_dependency_failure;
        if (!r.ok()) {
            ++out.errors;
            continue;
        }
        if (r.parse_failure()) ++out.parse_failures;
        if (!inc->ground_truth_root_cause) {
            if (warnings) warnings->push_back("incident " + r.incident_id + " has no reference root cause; text metrics skipped");
            continue;
        }
        std::vector<std::string> w;
        scores.push_back(metrics::score_text(r.predicted_root_cause, reference_root_cause(*inc), embedder, &w));
        (*inc->is_dependency_failure ? sd : nosd).push_back(scores.back());
        if (warnings)
            for (auto& msg : w) warnings->push_back(std::string(prompt::to_string(r.strategy)) + " " + r.incident_id + ": " + msg);
    }
    out.scored = scores.size();
    if (!scores.empty()) out.rows = metrics::aggregate(scores);
    if (!sd.empty()) out.rows_sd = metrics::aggregate(sd);
    if (!nosd.empty()) out.rows_nosd = metrics::aggregate(nosd);
    out.dependency = metrics::dependency_f1(records, truth);
    return out;
}

CaseResult evaluate_monitor(std::span<const MonitorRunRecord> records, const Corpus& corpus, Task task) {
    CaseResult out;
    if (!records.empty()) out.monitor_case = records.front().monitor_case;
    std::map<std::string, std::string> truth;
    for (const auto& r : records) {
        const auto& m = corpus.monitor(r.monitor_id);
        if (m.label(task)) truth[r.monitor_id] = *m.label(task);
    }
    const auto classes = corpus.ontology().classes(task);
    out.report = metrics::class_report(records, truth, classes);
    return out;
}

Report build_report(std::span<const RcaRunRecord> rca, std::span<const MonitorRunRecord> monitor,
                    const Corpus& corpus, const Embedder& embedder) {
    Report rep;
    for (auto s : prompt::kAllStrategies) {
        std::vector<RcaRunRecord> group;
        for (const auto& r : rca)
            if (r.strategy == s) group.push_back(r);
        if (group.empty()) continue;
        rep.rca.push_back(evaluate_rca(group, corpus, embedder, &rep.warnings));
    }
    for (auto task : {Task::Slo, Task::Resource}) {
        TaskResult tr;
        tr.task = task;
        for (auto c : prompt::kAllCases) {
            std::vector<MonitorRunRecord> group;
            for (const auto& r : monitor)
                if (r.task == task && r.monitor_case == c) group.push_back(r);
            if (group.empty()) continue;
            tr.cases.push_back(evaluate_monitor(group, corpus, task));
        }
        if (!tr.cases.empty()) rep.monitor.push_back(std::move(tr));
    }
    return rep;
}

ordered_json to_json(const Report& report) {
    ordered_json j;
    ordered_json rca;
    rca["columns"] = kRcaColumns;
    rca["excluded"] = ordered_json{{"FtGPT", kFtGptNote}};
    ordered_json strategies = ordered_json::object();
    for (const auto& s : report.rca) {
        ordered_json o;
        o["records"] = s.records;
        o["scored"] = s.scored;
        o["parse_failures"] = s.parse_failures;
        o["errors"] = s.errors;
        const auto rows_json = [](const std::vector<metrics::AggregateRow>& rows) {
            ordered_json out = ordered_json::object();
            for (const auto& r : rows) out[r.metric] = ordered_json{{"mean", r.mean}, {"std", r.std}};
            return out;
        };
        o["metrics"] = rows_json(s.rows);
        o["metrics_by_type"] = ordered_json{{"NoSD", rows_json(s.rows_nosd)}, {"SD", rows_json(s.rows_sd)}};
        o["dependency"] = ordered_json{{"precision", s.dependency.precision}, {"recall", s.dependency.recall},
                                       {"f1", s.dependency.f1},               {"tp", s.dependency.tp},
                                       {"fp", s.dependency.fp},               {"fn", s.dependency.fn},
                                       {"tn", s.dependency.tn}};
        strategies[std::string(prompt::to_string(s.strategy))] = o;
    }
    rca["strategies"] = strategies;
    j["rca"] = rca;

    ordered_json mon = ordered_json::object();
    for (const auto& t : report.monitor) {
        ordered_json cases = ordered_json::object();
        for (const auto& c : t.cases) {
            const auto& r = c.report;
            ordered_json per = ordered_json::object();
            for (const auto& [label, m] : r.per_class)
                per[label] = ordered_json{{"precision", m.precision}, {"recall", m.recall},   {"f1", m.f1},
                                          {"accuracy", m.class_accuracy}, {"support", m.support},
                                          {"predicted", m.predicted}};
            const auto triple = [](const metrics::PrfTriple& p) {
                return ordered_json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
            };
            cases[std::string(prompt::to_string(c.monitor_case))] =
                ordered_json{{"per_class", per},           {"overall_accuracy", r.overall_accuracy},
                             {"macro", triple(r.macro)},   {"micro", triple(r.micro)},
                             {"weighted", triple(r.weighted)}, {"parse_failures", r.parse_failures},
                             {"total", r.total}};
        }
        mon[std::string(to_string(t.task))] = cases;
    }
    j["monitor"] = mon;
    j["warnings"] = report.warnings;
    return j;
}

namespace {

constexpr const char* kMetricKeys[] = {"BLEU", "METEOR", "ROUGE", "Semantic"};

std::string mean_std_cell(const std::vector<metrics::AggregateRow>& rows, const char* key) {
    for (const auto& row : rows)
        if (row.metric == key) return fixed(row.mean) + " ± " + fixed(row.std);
    return "n/a";
}

}  // namespace

std::string render_rca_table(std::span<const StrategyResult> results) {
    constexpr std::size_t kLabel = 30, kCell = 16;
    const auto find = [&](prompt::RcaStrategy s) -> const StrategyResult* {
        for (const auto& r : results)
            if (r.strategy == s) return &r;
        return nullptr;
    };
    std::string out = "Root-cause recommendation (mean ± std, 0-100 scale)\n";
    std::string line = pad("Metric", kLabel);
    for (const char* c : kRcaColumns) line += pad(c, kCell);
    out += rstrip(line) + "\n";

    for (std::size_t m = 0; m < 4; ++m) {
        line = pad(kMetricLabels[m], kLabel) + pad("excluded", kCell);
        for (auto s : prompt::kAllStrategies) {
            const auto* r = find(s);
            line += pad(r ? mean_std_cell(r->rows, kMetricKeys[m]) : "n/a", kCell);
        }
        out += rstrip(line) + "\n";
    }
    const auto count_row = [&](const char* label, auto value) {
        std::string l = pad(label, kLabel) + pad("excluded", kCell);
        for (auto s : prompt::kAllStrategies) {
            const auto* r = find(s);
            l += pad(r ? value(*r) : std::string("n/a"), kCell);
        }
        out += rstrip(l) + "\n";
    };
    count_row("Dependency-failure F1", [](const StrategyResult& r) { return fixed(r.dependency.f1); });
    count_row("Dependency-failure P / R", [](const StrategyResult& r) {
        return fixed(r.dependency.precision) + " / " + fixed(r.dependency.recall);
    });
    count_row("Records (parse fail / error)", [](const StrategyResult& r) {
        return std::to_string(r.records) + " (" + std::to_string(r.parse_failures) + "/" + std::to_string(r.errors) + ")";
    });
    out += std::string("Note: ") + kFtGptNote + "\n";
    return out;
}

std::string render_rca_split_table(std::span<const StrategyResult> results) {
    constexpr std::size_t kLabel = 30, kCell = 15;
    const auto find = [&](prompt::RcaStrategy s) -> const StrategyResult* {
        for (const auto& r : results)
            if (r.strategy == s) return &r;
        return nullptr;
    };
    std::string out = "Root-cause recommendation by incident type (NoSD: other causes, SD: upstream dependency failure)\n";
    std::string line = pad("", kLabel);
    for (const char* c : kRcaColumns) line += pad(c, 2 * kCell);
    out += rstrip(line) + "\n";
    line = pad("Metric", kLabel);
    for (std::size_t i = 0; i < std::size(kRcaColumns); ++i) line += pad("NoSD", kCell) + pad("SD", kCell);
    out += rstrip(line) + "\n";
    for (std::size_t m = 0; m < 4; ++m) {
        line = pad(kMetricLabels[m], kLabel) + pad("excluded", kCell) + pad("excluded", kCell);
        for (auto s : prompt::kAllStrategies) {
            const auto* r = find(s);
            line += pad(r ? mean_std_cell(r->rows_nosd, kMetricKeys[m]) : "n/a", kCell);
            line += pad(r ? mean_std_cell(r->rows_sd, kMetricKeys[m]) : "n/a", kCell);
        }
        out += rstrip(line) + "\n";
    }
    return out;
}

std::string render_class_table(const TaskResult& result, const Ontology& ontology) {
    constexpr std::size_t kLabel = 20, kCell = 6;
    const auto find = [&](prompt::MonitorCase c) -> const metrics::ClassReport* {
        for (const auto& cr : result.cases)
            if (cr.monitor_case == c) return &cr.report;
        return nullptr;
    };
    std::string out = result.task == Task::Slo ? "SLO class prediction\n" : "Resource class prediction\n";
    static constexpr const char* groups[] = {"precision", "recall", "f1-score", "accuracy"};
    std::string line = pad("", kLabel);
    for (const char* g : groups) line += pad(g, kCell * 4 + 2);
    out += rstrip(line) + "\n";
    line = pad("Class", kLabel);
    for (std::size_t g = 0; g < 4; ++g) {
        for (auto c : prompt::kAllCases) line += pad(std::string(prompt::to_string(c)), kCell);
        line += "  ";
    }
    out += rstrip(line) + "\n";

    for (const auto& label : ontology.classes(result.task)) {
        line = pad(label, kLabel);
        for (std::size_t g = 0; g < 4; ++g) {
            for (auto c : prompt::kAllCases) {
                const auto* r = find(c);
                std::string cell = "n/a";
                if (r) {
                    const auto& m = r->at(label);
                    const double v = g == 0 ? m.precision : g == 1 ? m.recall : g == 2 ? m.f1 : m.class_accuracy;
                    cell = fixed(v);
                }
                line += pad(cell, kCell);
            }
            line += "  ";
        }
        out += rstrip(line) + "\n";
    }

    const auto summary = [&](const char* label, auto pick) {
        std::string l = pad(label, kLabel);
        for (std::size_t g = 0; g < 3; ++g) {
            for (auto c : prompt::kAllCases) {
                const auto* r = find(c);
                l += pad(r ? fixed(pick(*r, g)) : std::string("n/a"), kCell);
            }
            l += "  ";
        }
        out += rstrip(l) + "\n";
    };
    const auto of = [](const metrics::PrfTriple& t, std::size_t g) { return g == 0 ? t.precision : g == 1 ? t.recall : t.f1; };
    summary("macro avg", [&](const metrics::ClassReport& r, std::size_t g) { return of(r.macro, g); });
    summary("micro avg", [&](const metrics::ClassReport& r, std::size_t g) { return of(r.micro, g); });
    summary("weighted avg", [&](const metrics::ClassReport& r, std::size_t g) { return of(r.weighted, g); });

    line = pad("overall accuracy", kLabel);
    std::string pf = pad("parse failures", kLabel);
    for (auto c : prompt::kAllCases) {
        const auto* r = find(c);
        line += pad(r ? fixed(r->overall_accuracy) : std::string("n/a"), kCell);
        pf += pad(r ? std::to_string(r->parse_failures) : std::string("n/a"), kCell);
    }
    out += rstrip(line) + "\n" + rstrip(pf) + "\n";
    return out;
}

std::string render_text(const Report& report, const Ontology& ontology) {
    std::string out = render_rca_table(report.rca);
    out += "\n" + render_rca_split_table(report.rca);
    for (const auto& t : report.monitor) out += "\n" + render_class_table(t, ontology);
    return out;
}

}  // namespace xlc::report
