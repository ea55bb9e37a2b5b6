#include "xlc/prompt.hpp"

#include "xlc/error.hpp"
#include "xlc/hash.hpp"
#include "xlc/retrieval.hpp"
#include "xlc/templates.hpp"
#include "xlc/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

namespace xlc::prompt {

namespace t = templates;

std::string_view to_string(RcaStrategy s) noexcept {
    switch (s) {
        case RcaStrategy::NoDEP: return "NoDEP";
        case RcaStrategy::DEP: return "DEP";
        case RcaStrategy::InC_NoDEP: return "InC_NoDEP";
        case RcaStrategy::InC_DEP: return "InC_DEP";
    }
    return "NoDEP";
}

std::string_view cli_name(RcaStrategy s) noexcept {
    switch (s) {
        case RcaStrategy::NoDEP: return "nodep";
        case RcaStrategy::DEP: return "dep";
        case RcaStrategy::InC_NoDEP: return "inc-nodep";
        case RcaStrategy::InC_DEP: return "inc-dep";
    }
    return "nodep";
}

std::optional<RcaStrategy> parse_strategy(std::string_view textv) noexcept {
    for (auto s : kAllStrategies)
        if (text::iequals(textv, to_string(s)) || text::iequals(textv, cli_name(s))) return s;
    return std::nullopt;
}

std::string_view to_string(MonitorCase c) noexcept {
    switch (c) {
        case MonitorCase::C1: return "C1";
        case MonitorCase::C2: return "C2";
        case MonitorCase::C3: return "C3";
        case MonitorCase::C4: return "C4";
    }
    return "C1";
}

std::optional<MonitorCase> parse_case(std::string_view textv) noexcept {
    for (auto c : kAllCases)
        if (text::iequals(textv, to_string(c))) return c;
    return std::nullopt;
}

std::string_view to_string(Section s) noexcept {
    switch (s) {
        case Section::TaskDescription: return "TaskDescription";
        case Section::HistoricalExamples: return "HistoricalExamples";
        case Section::AnsweringFormat: return "AnsweringFormat";
        case Section::IncidentDetails: return "IncidentDetails";
        case Section::UpstreamDependencies: return "UpstreamDependencies";
        case Section::AdditionalGuidance: return "AdditionalGuidance";
        case Section::MonitorMetadata: return "MonitorMetadata";
        case Section::ServiceDescription: return "ServiceDescription";
        case Section::ComponentDescriptions: return "ComponentDescriptions";
    }
    return "TaskDescription";
}

std::string RenderedPrompt::hash_hex() const { return to_hex(hash); }

namespace {

std::string field(std::string_view value) { return text::collapse_whitespace(value); }

class Builder {
  public:
    void add(Section s, std::string body) { parts_.emplace_back(s, std::move(body)); }

    RenderedPrompt finish(std::vector<std::string> warnings = {}) && {
        RenderedPrompt out;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) out.text += "\n\n";
            out.text += parts_[i].second;
            out.sections.push_back(parts_[i].first);
        }
        out.text += '\n';
        out.hash = prompt_hash(out.text);
        out.warnings = std::move(warnings);
        return out;
    }

  private:
    std::vector<std::pair<Section, std::string>> parts_;
};

std::string rca_task_section(bool with_upstream) {
    std::string s(t::kRcaTaskHeading);
    s += "\n\n";
    s += t::kRcaTaskRole;
    s += "\n\n";
    s += t::kRcaTaskInputs;
    if (with_upstream) {
        for (auto para : {t::kRcaTaskUpstreamIntro, t::kRcaTaskUpstreamDefinition, t::kRcaTaskUpstreamPurpose}) {
            s += "\n\n";
            s += para;
        }
    }
    return s;
}

std::string rca_examples_section(std::span<const Example> examples) {
    std::string s(t::kRcaExamplesHeading);
    s += "\n\n";
    s += t::kRcaExamplesIntro;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto n = std::to_string(i + 1);
        s += "\n\n- Historical Incident Summary " + n + ": " + field(examples[i].summary);
        s += "\n\n- Historical Incident Title " + n + ": " + field(examples[i].title);
        s += "\n\n- Historical Incident Root Cause " + n + ": " + field(examples[i].root_cause);
    }
    return s;
}

std::string rca_answer_section() {
    std::string s(t::kRcaAnswerHeading);
    s += "\n\n";
    s += t::kRcaObjective1;
    s += "\n\n";
    s += t::kRcaObjective2;
    return s;
}

std::string rca_details_section(const Incident& incident, const Service& service) {
    const auto& functionality =
        service.summarized_description ? *service.summarized_description : service.description;
    std::string s(t::kRcaDetailsHeading);
    s += "\n- Service: " + field(service.name);
    s += "\n\n- Functionality: " + field(functionality);
    s += "\n\n- Incident Summary: " + field(retrieval::incident_summary_text(incident));
    s += "\n\n- Incident Title: " + field(incident.title);
    return s;
}

std::string rca_upstream_section(std::span<const UpstreamInfo> upstream) {
    std::string s(t::kRcaUpstreamHeading);
    s += "\n\n";
    if (upstream.empty()) {
        s += t::kRcaNoUpstream;
        return s;
    }
    for (std::size_t i = 0; i < upstream.size(); ++i) {
        if (i) s += "\n\n";
        s += std::to_string(i + 1) + ". " + field(upstream[i].name);
        s += t::kRcaUpstreamSeparator;
        s += field(upstream[i].description);
    }
    return s;
}

}  // namespace

RenderedPrompt build_rca_prompt(RcaStrategy strategy, const Incident& incident, const Service& owning_service,
                                std::span<const UpstreamInfo> upstream, std::span<const Example> examples,
                                std::size_t example_pool, bool service_has_upstream) {
    std::vector<std::string> warnings;
    if (examples.size() > kMaxExamples)
        throw PreconditionError("at most " + std::to_string(kMaxExamples) + " in-context examples are allowed, got " +
                                std::to_string(examples.size()));
    if (uses_examples(strategy)) {
        if (examples.empty() && example_pool > 0)
            throw MissingExamples("strategy " + std::string(to_string(strategy)) + " for incident " + incident.id +
                                  " needs in-context examples");
        if (examples.size() < kMaxExamples)
            warnings.push_back("incident " + incident.id + ": only " + std::to_string(examples.size()) +
                               " in-context examples available");
    }
    if (uses_upstream(strategy) && upstream.empty() && service_has_upstream)
        throw PreconditionError("service " + owning_service.id + " has upstream edges but none were supplied");

    Builder b;
    b.add(Section::TaskDescription, rca_task_section(uses_upstream(strategy)));
    if (uses_examples(strategy)) b.add(Section::HistoricalExamples, rca_examples_section(examples));
    b.add(Section::AnsweringFormat, rca_answer_section());
    b.add(Section::IncidentDetails, rca_details_section(incident, owning_service));
    if (uses_upstream(strategy)) b.add(Section::UpstreamDependencies, rca_upstream_section(upstream));
    return std::move(b).finish(std::move(warnings));
}

RenderedPrompt build_monitor_prompt(Task task, MonitorCase c, const Monitor& monitor, const Service& service,
                                    const Ontology& ontology) {
    Builder b;

    std::string task_s(t::kMonitorTaskHeading);
    task_s += "\n\n";
    task_s += t::kMonitorRolePrefix;
    task_s += task == Task::Resource ? "resource class" : "SLO class";
    task_s += t::kMonitorRoleSuffix;
    task_s += "\n\n";
    task_s += task == Task::Resource ? t::kMonitorQ1Resource : t::kMonitorQ1Slo;
    task_s += "\n\n";
    task_s += t::kMonitorQ2;
    const auto classes = ontology.classes(task);
    for (std::size_t i = 0; i < classes.size(); ++i) task_s += "\n    " + std::to_string(i + 1) + ". " + classes[i];
    b.add(Section::TaskDescription, std::move(task_s));

    b.add(Section::AdditionalGuidance, std::string(t::kMonitorGuidance));

    std::string meta(t::kMonitorMetadataHeading);
    meta += "\n- Monitor Name: " + field(monitor.monitor_name);
    meta += "\n- Metric Name: " + field(monitor.metric_name);
    meta += "\n- Service Name: " + field(service.name);
    meta += "\n- Alert Title: " + field(monitor.alert_title);
    meta += "\n- Alert Conditions: " + field(monitor.alert_conditions);
    b.add(Section::MonitorMetadata, std::move(meta));

    if (uses_service_description(c)) {
        std::string s(t::kMonitorServiceHeading);
        const auto desc = field(service.description);
        s += "\n";
        s += desc.empty() ? std::string(t::kMonitorNoServiceDescription) : "- " + field(service.name) + ": " + desc;
        b.add(Section::ServiceDescription, std::move(s));
    }
    if (uses_components(c)) {
        std::string s(t::kMonitorComponentsHeading);
        if (service.components.empty()) {
            s += "\n";
            s += t::kMonitorNoComponents;
        }
        for (std::size_t i = 0; i < service.components.size(); ++i) {
            const auto& comp = service.components[i];
            s += "\n- Component " + std::to_string(i + 1) + " - " + field(comp.name) + ": " + field(comp.description);
        }
        b.add(Section::ComponentDescriptions, std::move(s));
    }
    return std::move(b).finish();
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

/// End (one past '}') of the brace-balanced span starting at `open`, or npos.
std::size_t match_object(std::string_view s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char ch = s[i];
        if (in_string) {
            if (ch == '\\') ++i;
            else if (ch == '"') in_string = false;
            continue;
        }
        if (ch == '"') in_string = true;
        else if (ch == '{') ++depth;
        else if (ch == '}' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

const nlohmann::json* find_key(const nlohmann::json& obj, std::string_view key) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (text::iequals(it.key(), key)) return &it.value();
    return nullptr;
}

std::string_view strip_label(std::string_view v) {
    v = text::trim(v);
    for (bool changed = true; changed && !v.empty();) {
        changed = false;
        if (v.back() == '.') {
            v.remove_suffix(1);
            changed = true;
        }
        if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
            v = v.substr(1, v.size() - 2);
            changed = true;
        }
        v = text::trim(v);
    }
    return v;
}

}  // namespace

RcaAnswer parse_rca_response(std::string_view textv) {
    std::optional<nlohmann::json> object;
    for (auto open = textv.find('{'); open != std::string_view::npos; open = textv.find('{', open + 1)) {
        const auto end = match_object(textv, open);
        if (end == std::string_view::npos) continue;
        auto parsed = nlohmann::json::parse(textv.substr(open, end - open), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) {
            object = std::move(parsed);
            break;
        }
    }
    if (!object) throw ParseError(ParseErrorKind::no_json, "response contains no JSON object");

    const auto* o1 = find_key(*object, "Objective1");
    const auto* o2 = find_key(*object, "Objective2");
    if (!o1 || !o2) throw ParseError(ParseErrorKind::missing_field, o1 ? "Objective2 is missing" : "Objective1 is missing");
    if (!o1->is_string() || text::trim(o1->get_ref<const std::string&>()).empty())
        throw ParseError(ParseErrorKind::missing_field, "Objective1 is not a non-empty string");
    if (!o2->is_string()) throw ParseError(ParseErrorKind::bad_label, "Objective2 is not a string");

    const auto label = strip_label(o2->get_ref<const std::string&>());
    RcaAnswer answer;
    answer.root_cause = std::string(text::trim(o1->get_ref<const std::string&>()));
    if (text::iequals(label, "yes")) answer.is_dependency_failure = true;
    else if (text::iequals(label, "no")) answer.is_dependency_failure = false;
    else throw ParseError(ParseErrorKind::bad_label, "Objective2 must be Yes or No, got '" + std::string(label) + "'");
    return answer;
}

std::string render_rca_answer(const RcaAnswer& answer) {
    nlohmann::ordered_json j;
    j["Objective1"] = answer.root_cause;
    j["Objective2"] = answer.is_dependency_failure ? "Yes" : "No";
    return j.dump(2);
}

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

ClassAnswer parse_monitor_response(std::string_view textv, Task task, const Ontology& ontology) {
    ClassAnswer out;
    const auto q2 = textv.rfind("Q2");
    const std::string_view answer = q2 == std::string_view::npos ? textv : textv.substr(q2 + 2);

    const auto q1 = textv.find("Q1");
    std::string_view rationale = textv.substr(0, q2 == std::string_view::npos ? textv.size() : q2);
    if (q1 != std::string_view::npos && (q2 == std::string_view::npos || q1 < q2))
        rationale = textv.substr(q1 + 2, (q2 == std::string_view::npos ? textv.size() : q2) - q1 - 2);
    rationale = text::trim(rationale);
    if (!rationale.empty() && rationale.front() == ':') rationale = text::trim(rationale.substr(1));
    out.rationale = text::collapse_whitespace(rationale);

    const auto hay = text::label_key(answer);
    std::size_t best_pos = std::string::npos;
    std::size_t best_len = 0;
    for (const auto& label : ontology.classes(task)) {
        const auto key = text::label_key(label);
        for (auto pos = hay.find(key); pos != std::string::npos; pos = hay.find(key, pos + 1)) {
            if (pos > 0 && is_alnum(hay[pos - 1])) continue;
            auto end = pos + key.size();
            if (end < hay.size() && hay[end] == 's') ++end;
            if (end < hay.size() && is_alnum(hay[end])) continue;
            if (best_pos == std::string::npos || pos > best_pos || (pos == best_pos && key.size() > best_len)) {
                best_pos = pos;
                best_len = key.size();
                out.predicted = label;
            }
        }
    }
    return out;
}

}  // namespace xlc::prompt
