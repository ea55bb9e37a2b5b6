#include "xlc/llm.hpp"

#include "http_json.hpp"
#include "xlc/error.hpp"
#include "xlc/hash.hpp"
#include "xlc/templates.hpp"
#include "xlc/text.hpp"
#include "xlc/vocabulary.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

namespace xlc::llm {

using ordered_json = nlohmann::ordered_json;

void CompletionRequest::validate() const {
    if (prompt.empty()) throw PreconditionError("completion request has an empty prompt");
    if (!(temperature >= 0.0)) throw PreconditionError("completion temperature must be >= 0");
    if (max_output_tokens == 0) throw PreconditionError("max_output_tokens must be positive");
}

std::string_view to_string(ProviderKind kind) noexcept {
    switch (kind) {
        case ProviderKind::remote_http: return "remote_http";
        case ProviderKind::replay_fixture: return "replay_fixture";
        case ProviderKind::rule_stub: return "rule_stub";
    }
    return "rule_stub";
}

std::optional<ProviderKind> parse_provider_kind(std::string_view text) noexcept {
    for (auto k : {ProviderKind::remote_http, ProviderKind::replay_fixture, ProviderKind::rule_stub})
        if (to_string(k) == text) return k;
    if (text == "remote") return ProviderKind::remote_http;
    if (text == "replay") return ProviderKind::replay_fixture;
    if (text == "stub") return ProviderKind::rule_stub;
    return std::nullopt;
}

std::size_t estimate_tokens(std::string_view text) noexcept { return (text.size() + 3) / 4; }

Completion complete_with_usage(Provider& provider, const CompletionRequest& request) {
    request.validate();
    const auto estimated = estimate_tokens(request.prompt);
    const auto budget = provider.context_window();
    if (estimated + request.max_output_tokens > budget)
        throw PromptTooLarge(estimated + request.max_output_tokens, budget);
    return provider.send(request);
}

std::string complete(Provider& provider, const CompletionRequest& request) {
    return complete_with_usage(provider, request).text;
}

// ---------------------------------------------------------------------------
// Rule stub

namespace {

/// Text from the line starting with `heading` up to the next "-- " heading.
std::string_view section(std::string_view prompt, std::string_view heading) {
    auto start = prompt.find(heading);
    while (start != std::string_view::npos && start != 0 && prompt[start - 1] != '\n')
        start = prompt.find(heading, start + 1);
    if (start == std::string_view::npos) return {};
    const auto body = start + heading.size();
    auto end = prompt.find("\n-- ", body);
    if (end == std::string_view::npos) end = prompt.size();
    return prompt.substr(body, end - body);
}

std::string line_value(std::string_view block, std::string_view prefix) {
    for (auto line : text::split_lines(block))
        if (line.substr(0, prefix.size()) == prefix) return std::string(text::trim(line.substr(prefix.size())));
    return {};
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += i + 1 == names.size() ? " and " : ", ";
        out += names[i];
    }
    return out;
}

std::string rca_answer(std::string_view prompt) {
    static const std::regex marker(R"(faulty:\s*([A-Za-z0-9][A-Za-z0-9_.\-]*[A-Za-z0-9]|[A-Za-z0-9]))");
    std::vector<std::string> faulty;
    const auto upstream = std::string(section(prompt, templates::kRcaUpstreamHeading));
    for (auto it = std::sregex_iterator(upstream.begin(), upstream.end(), marker); it != std::sregex_iterator();
         ++it) {
        auto name = (*it)[1].str();
        if (std::find(faulty.begin(), faulty.end(), name) == faulty.end()) faulty.push_back(std::move(name));
    }
    auto service = line_value(section(prompt, templates::kRcaDetailsHeading), "- Service:");
    if (service.empty()) service = "the affected service";

    ordered_json answer;
    if (!faulty.empty()) {
        answer["Objective1"] = "The incident in " + service + " was caused by a failure in the upstream service " +
                               join_names(faulty) + ", which propagated to the dependent service.";
        answer["Objective2"] = "Yes";
    } else {
        answer["Objective1"] = "The incident was caused by an issue within " + service +
                               " itself, such as a code or configuration regression.";
        answer["Objective2"] = "No";
    }
    return "Here is my analysis of the incident:\n```json\n" + answer.dump(2) + "\n```\n";
}

std::string monitor_answer(std::string_view prompt) {
    const Task task = prompt.find("predict the SLO class") != std::string_view::npos ? Task::Slo : Task::Resource;

    // Menu entries: indented "N. Label" lines following the Q2 line.
    std::vector<std::string> menu;
    const auto q2 = prompt.find(templates::kMonitorQ2);
    if (q2 != std::string_view::npos) {
        static const std::regex entry(R"(^\s+(\d+)\.\s+(.+)$)");
        bool started = false;
        for (auto line : text::split_lines(prompt.substr(q2 + templates::kMonitorQ2.size()))) {
            std::smatch m;
            const std::string l(line);
            if (std::regex_match(l, m, entry)) {
                menu.push_back(text::collapse_whitespace(m[2].str()));
                started = true;
            } else if (started || !text::trim(line).empty()) {
                if (started) break;
            }
        }
    }
    if (menu.empty()) return "Q1: The monitor metadata could not be interpreted.\n\nQ2: The class is unclear.";

    const auto data_start = prompt.find(templates::kMonitorMetadataHeading);
    const auto data = data_start == std::string_view::npos ? prompt : prompt.substr(data_start);
    const auto tokens = vocabulary::split_identifiers(data);

    std::size_t best = menu.size();
    std::size_t best_hits = 0;
    for (std::size_t i = 0; i < menu.size(); ++i) {
        const auto* vocab = vocabulary::find(task, menu[i]);
        if (!vocab) continue;
        const auto hits = vocabulary::keyword_hits(tokens, *vocab);
        if (hits > best_hits) {
            best = i;
            best_hits = hits;
        }
    }
    std::string rationale;
    if (best == menu.size()) {
        const auto fallback = std::find_if(menu.begin(), menu.end(), [](const std::string& l) {
            const auto key = text::label_key(l);
            return key == "none of the above" || key == "others";
        });
        best = fallback == menu.end() ? menu.size() - 1 : static_cast<std::size_t>(fallback - menu.begin());
        rationale = "The metadata does not mention any characteristic resource or objective.";
    } else {
        rationale = "The monitor metadata contains " + std::to_string(best_hits) +
                    " term(s) characteristic of " + menu[best] + ".";
    }
    const std::string subject = task == Task::Slo ? "The SLO being tracked by this monitor" : "The entity tracked by this monitor";
    return "Q1: " + rationale + "\n\nQ2: " + subject + " can be categorized under the generic class of '" +
           std::to_string(best + 1) + ". " + menu[best] + "'.";
}

std::string third_person(std::string sentence) {
    static const std::pair<std::regex, const char*> rules[] = {
        {std::regex(R"(\bWe\b)"), "The service"}, {std::regex(R"(\bwe\b)"), "the service"},
        {std::regex(R"(\bOur\b)"), "Its"},        {std::regex(R"(\bour\b)"), "its"},
        {std::regex(R"(\bus\b)"), "it"},
    };
    for (const auto& [re, repl] : rules) sentence = std::regex_replace(sentence, re, repl);
    return sentence;
}

std::string first_sentences(std::string_view textv, std::size_t n) {
    const auto sentences = text::split_sentences(text::collapse_whitespace(textv));
    std::string out;
    for (std::size_t i = 0; i < sentences.size() && i < n; ++i) {
        if (i) out.push_back(' ');
        out += sentences[i];
    }
    return out;
}

std::string service_summary_answer(std::string_view prompt) {
    static const std::regex line_re(R"(^Upstream service \d+ - (.*)$)");
    std::string out;
    for (auto line : text::split_lines(prompt)) {
        std::smatch m;
        const std::string l(line);
        if (!std::regex_match(l, m, line_re)) continue;
        const auto summary = third_person(first_sentences(m[1].str(), 2));
        if (summary.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += summary;
    }
    return out.empty() ? "The service has no description." : out;
}

std::string incident_summary_answer(std::string_view prompt) {
    // The text to summarize follows the "<Field>:" line at the end of the prompt.
    const auto marker = prompt.rfind(":\n");
    auto body = marker == std::string_view::npos ? prompt : prompt.substr(marker + 2);
    auto summary = first_sentences(body, 2);
    constexpr std::size_t kMaxChars = 400;
    if (summary.size() > kMaxChars) {
        auto cut = summary.rfind(' ', kMaxChars);
        summary.resize(cut == std::string::npos ? kMaxChars : cut);
    }
    return summary.empty() ? "No details were provided." : summary;
}

}  // namespace

std::string RuleStubProvider::respond(std::string_view prompt) {
    if (prompt.find("Objective2") != std::string_view::npos) return rca_answer(prompt);
    if (prompt.find(templates::kMonitorQ2) != std::string_view::npos) return monitor_answer(prompt);
    if (prompt.find(templates::kServiceSummaryTask) != std::string_view::npos) return service_summary_answer(prompt);
    if (prompt.find(templates::kIncidentSummaryTaskPrefix) != std::string_view::npos)
        return incident_summary_answer(prompt);
    return "No rule applies to this prompt.";
}

Completion RuleStubProvider::send(const CompletionRequest& request) { return {respond(request.prompt), std::nullopt}; }

// ---------------------------------------------------------------------------
// Replay / recording

ReplayProvider::ReplayProvider(std::filesystem::path fixture_dir) : dir_(std::move(fixture_dir)) {}

Completion ReplayProvider::send(const CompletionRequest& request) {
    const auto hash = prompt_hash_hex(request.prompt);
    std::ifstream in(dir_ / (hash + ".txt"), std::ios::binary);
    if (!in) throw FixtureMiss(hash);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {buf.str(), read_recorded_usage(dir_, hash)};
}

std::optional<Usage> read_recorded_usage(const std::filesystem::path& fixture_dir, std::string_view hash) {
    std::ifstream in(fixture_dir / (std::string(hash) + ".usage.json"), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(in);
        return Usage{j.value("prompt_tokens", std::size_t{0}), j.value("completion_tokens", std::size_t{0})};
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

RecordingProvider::RecordingProvider(std::unique_ptr<Provider> inner, std::filesystem::path fixture_dir)
    : inner_(std::move(inner)), dir_(std::move(fixture_dir)) {
    std::filesystem::create_directories(dir_);
    set_context_window(inner_->context_window());
}

namespace {

void write_atomically(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write fixture " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

Completion RecordingProvider::send(const CompletionRequest& request) {
    auto completion = inner_->send(request);
    const auto hash = prompt_hash_hex(request.prompt);
    write_atomically(dir_ / (hash + ".txt"), completion.text);
    if (completion.usage) {
        ordered_json usage{{"prompt_tokens", completion.usage->prompt_tokens},
                           {"completion_tokens", completion.usage->completion_tokens}};
        write_atomically(dir_ / (hash + ".usage.json"), usage.dump() + "\n");
    }
    return completion;
}

// ---------------------------------------------------------------------------
// Remote

std::chrono::milliseconds RetryPolicy::delay_before(int attempt) const {
    const double scale = std::pow(factor, std::max(0, attempt - 2));
    return std::chrono::milliseconds(static_cast<long long>(std::llround(base_delay.count() * scale)));
}

RemoteConfig RemoteConfig::from_environment() {
    RemoteConfig config;
    if (const char* e = std::getenv("XLC_LLM_ENDPOINT")) config.endpoint = e;
    if (const char* k = std::getenv("XLC_LLM_KEY")) config.api_key = k;
    return config;
}

RemoteHttpProvider::RemoteHttpProvider(RemoteConfig config) : config_(std::move(config)) {}

Completion RemoteHttpProvider::send(const CompletionRequest& request) {
    ordered_json body;
    body["model"] = request.model;
    body["messages"] = ordered_json::array({ordered_json{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;
    const auto response = detail::post_json(config_, nlohmann::json::parse(body.dump()));
    try {
        Completion out;
        out.text = response.at("choices").at(0).at("message").at("content").get<std::string>();
        if (const auto it = response.find("usage"); it != response.end() && it->is_object())
            out.usage = Usage{it->value("prompt_tokens", std::size_t{0}), it->value("completion_tokens", std::size_t{0})};
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(200, std::string("malformed chat-completions response: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(Provider& provider, std::size_t max_in_flight)
    : provider_(provider), max_in_flight_(std::max<std::size_t>(1, max_in_flight)) {}

void Gateway::run_bounded(std::size_t n, const std::function<void(std::size_t)>& task) const {
    if (n == 0) return;
    const std::size_t workers = std::min(n, max_in_flight_);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < n; i = next++) task(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<Gateway::Outcome> Gateway::complete_all(std::span<const CompletionRequest> requests) const {
    std::vector<Outcome> outcomes(requests.size());
    run_bounded(requests.size(), [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        try {
            outcomes[i].text = complete(provider_, requests[i]);
        } catch (...) {
            outcomes[i].error = std::current_exception();
        }
        outcomes[i].elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    });
    return outcomes;
}

// ---------------------------------------------------------------------------
// Summarization

std::string render_service_summary_prompt(std::span<const Service> services) {
    std::string out;
    out += templates::kServiceSummaryRole;
    out += "\n\n";
    for (std::size_t i = 0; i < services.size(); ++i) {
        out += "Upstream service " + std::to_string(i + 1) + " - " + text::collapse_whitespace(services[i].description);
        out += '\n';
    }
    out += '\n';
    out += templates::kServiceSummaryTask;
    out += '\n';
    out += templates::kServiceSummaryFocus;
    out += '\n';
    out += templates::kServiceSummaryConstraint;
    out += '\n';
    return out;
}

SummaryBundle summarize_service_descriptions(Provider& provider, std::span<const Service> services,
                                             const SummarizeOptions& options) {
    if (services.empty()) throw PreconditionError("summarize_service_descriptions needs at least one service");
    for (const auto& s : services)
        if (text::trim(s.description).empty())
            throw PreconditionError("service '" + s.id + "' has no description to summarize");
    SummaryBundle bundle;
    const auto prompt = render_service_summary_prompt(services);
    bundle.prompt_hash = prompt_hash(prompt);
    for (const auto& s : services) bundle.source_ids.push_back(s.id);
    bundle.summary = std::string(text::trim(complete(provider, {options.model, prompt, 0.0, options.max_output_tokens})));
    if (bundle.summary.empty()) throw ProviderError(200, "empty summary for services " + bundle.source_ids.front());
    return bundle;
}

std::string render_incident_summary_prompt(IncidentField field, std::string_view cleaned_text) {
    const bool summary = field == IncidentField::summary;
    std::string out;
    out += templates::kIncidentSummaryRole;
    out += '\n';
    out += templates::kIncidentSummaryTaskPrefix;
    out += summary ? "summary" : "root cause";
    out += ".\n";
    out += templates::kIncidentSummaryRules;
    out += "\n\n";
    out += summary ? "Incident Summary" : "Incident Root Cause";
    out += ":\n";
    out += cleaned_text;
    out += '\n';
    return out;
}

IncidentSummaries summarize_incident_fields(Provider& provider, const Incident& incident,
                                            const SummarizeOptions& options, const sanitize::CleanOptions& clean) {
    const auto run = [&](IncidentField field, std::string_view raw) {
        const auto cleaned = sanitize::clean_text(raw, clean).text;
        const auto prompt = render_incident_summary_prompt(field, cleaned.empty() ? incident.title : cleaned);
        return std::string(text::trim(complete(provider, {options.model, prompt, 0.0, options.max_output_tokens})));
    };
    IncidentSummaries out;
    out.clean_summary = run(IncidentField::summary, incident.raw_summary);
    if (incident.ground_truth_root_cause) out.clean_root_cause = run(IncidentField::root_cause, *incident.ground_truth_root_cause);
    return out;
}

}  // namespace xlc::llm
