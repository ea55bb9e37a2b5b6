#include "xlc/records.hpp"

#include "xlc/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace xlc {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class T>
void put_optional(ordered_json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

void write_lines(const std::filesystem::path& file, const std::vector<ordered_json>& rows) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        for (const auto& row : rows) out << row.dump() << '\n';
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

template <class Record, class Parse>
std::vector<Record> read_lines(const std::filesystem::path& file, Parse parse) {
    std::vector<Record> out;
    std::ifstream in(file, std::ios::binary);
    if (!in) return out;
    std::string line;
    std::size_t n = 0;
    const auto name = file.filename().string();
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(name, n, std::string("invalid JSON: ") + e.what());
        }
        out.push_back(parse(j, name, n));
    }
    return out;
}

}  // namespace

ordered_json to_json(const RcaRunRecord& r) {
    ordered_json j;
    j["incident_id"] = r.incident_id;
    j["strategy"] = prompt::to_string(r.strategy);
    j["prompt_hash"] = r.prompt_hash;
    j["predicted_root_cause"] = r.predicted_root_cause;
    put_optional(j, "predicted_dependency", r.predicted_dependency);
    j["examples_used"] = r.examples_used;
    j["elapsed_ms"] = r.elapsed_ms;
    j["provider"] = llm::to_string(r.provider);
    put_optional(j, "parse_error", r.parse_error);
    put_optional(j, "error", r.error);
    return j;
}

ordered_json to_json(const MonitorRunRecord& r) {
    ordered_json j;
    j["monitor_id"] = r.monitor_id;
    j["task"] = to_string(r.task);
    j["case"] = prompt::to_string(r.monitor_case);
    j["prompt_hash"] = r.prompt_hash;
    put_optional(j, "predicted", r.predicted.predicted);
    j["rationale"] = r.predicted.rationale;
    j["elapsed_ms"] = r.elapsed_ms;
    j["provider"] = llm::to_string(r.provider);
    put_optional(j, "error", r.error);
    return j;
}

RcaRunRecord rca_record_from_json(const json& j, const std::string& file, std::size_t line) {
    try {
        RcaRunRecord r;
        r.incident_id = j.at("incident_id").get<std::string>();
        const auto strategy = prompt::parse_strategy(j.at("strategy").get<std::string>());
        if (!strategy) throw SchemaError(file, line, "unknown strategy");
        r.strategy = *strategy;
        r.prompt_hash = j.at("prompt_hash").get<std::string>();
        r.predicted_root_cause = j.value("predicted_root_cause", std::string{});
        if (const auto it = j.find("predicted_dependency"); it != j.end() && !it->is_null())
            r.predicted_dependency = it->get<bool>();
        r.examples_used = j.value("examples_used", std::vector<std::string>{});
        r.elapsed_ms = j.value("elapsed_ms", std::int64_t{0});
        const auto provider = llm::parse_provider_kind(j.value("provider", std::string("rule_stub")));
        if (!provider) throw SchemaError(file, line, "unknown provider");
        r.provider = *provider;
        r.parse_error = opt_string(j, "parse_error");
        r.error = opt_string(j, "error");
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(file, line, e.what());
    }
}

MonitorRunRecord monitor_record_from_json(const json& j, const std::string& file, std::size_t line) {
    try {
        MonitorRunRecord r;
        r.monitor_id = j.at("monitor_id").get<std::string>();
        const auto task = parse_task(j.at("task").get<std::string>());
        if (!task) throw SchemaError(file, line, "unknown task");
        r.task = *task;
        const auto c = prompt::parse_case(j.at("case").get<std::string>());
        if (!c) throw SchemaError(file, line, "unknown case");
        r.monitor_case = *c;
        r.prompt_hash = j.at("prompt_hash").get<std::string>();
        r.predicted.predicted = opt_string(j, "predicted");
        r.predicted.rationale = j.value("rationale", std::string{});
        r.elapsed_ms = j.value("elapsed_ms", std::int64_t{0});
        const auto provider = llm::parse_provider_kind(j.value("provider", std::string("rule_stub")));
        if (!provider) throw SchemaError(file, line, "unknown provider");
        r.provider = *provider;
        r.error = opt_string(j, "error");
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(file, line, e.what());
    }
}

std::vector<RcaRunRecord> read_rca_runs(const std::filesystem::path& file) {
    return read_lines<RcaRunRecord>(file, rca_record_from_json);
}

std::vector<MonitorRunRecord> read_monitor_runs(const std::filesystem::path& file) {
    return read_lines<MonitorRunRecord>(file, monitor_record_from_json);
}

void write_rca_runs(const std::filesystem::path& file, const std::vector<RcaRunRecord>& records) {
    std::vector<ordered_json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(to_json(r));
    write_lines(file, rows);
}

void write_monitor_runs(const std::filesystem::path& file, const std::vector<MonitorRunRecord>& records) {
    std::vector<ordered_json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(to_json(r));
    write_lines(file, rows);
}

}  // namespace xlc
