#include "xlc/corpus.hpp"

#include "xlc/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace xlc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z')
        return std::nullopt;
    const auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int value = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            value = value * 10 + (text[i] - '0');
        }
        return value;
    };
    const auto y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2), s = num(17, 2);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    if (*h > 23 || *mi > 59 || *s > 59) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd} + std::chrono::hours{*h} + std::chrono::minutes{*mi} +
           std::chrono::seconds{*s};
}

std::string format_timestamp(Timestamp ts) {
    const auto days = std::chrono::floor<std::chrono::days>(ts);
    const std::chrono::year_month_day ymd{days};
    const std::chrono::hh_mm_ss hms{ts - days};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::shared_subscription: return "shared_subscription";
        case Provenance::dns_log: return "dns_log";
        case Provenance::shared_resource: return "shared_resource";
        case Provenance::declared: return "declared";
    }
    return "declared";
}

std::optional<Provenance> parse_provenance(std::string_view text) noexcept {
    for (auto p : {Provenance::shared_subscription, Provenance::dns_log, Provenance::shared_resource,
                   Provenance::declared})
        if (to_string(p) == text) return p;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

template <class T, class Key>
void sort_by(std::vector<T>& items, Key key) {
    std::sort(items.begin(), items.end(), [&](const T& a, const T& b) { return key(a) < key(b); });
}

}  // namespace

Corpus::Corpus(CorpusParts parts) : parts_(std::move(parts)) {}

Corpus Corpus::build(CorpusParts parts) {
    sort_by(parts.services, [](const Service& s) -> const std::string& { return s.id; });
    sort_by(parts.incidents, [](const Incident& i) -> const std::string& { return i.id; });
    sort_by(parts.monitors, [](const Monitor& m) -> const std::string& { return m.id; });
    std::sort(parts.edges.begin(), parts.edges.end(), [](const DependencyEdge& a, const DependencyEdge& b) {
        return std::tie(a.dependent_service_id, a.upstream_service_id) <
               std::tie(b.dependent_service_id, b.upstream_service_id);
    });
    for (auto& s : parts.services)
        sort_by(s.components, [](const Component& c) -> const std::string& { return c.id; });

    Corpus corpus(std::move(parts));
    auto& p = corpus.parts_;

    for (std::size_t i = 0; i < p.services.size(); ++i) {
        const auto& s = p.services[i];
        if (s.id.empty()) throw SchemaError(corpus_files::services, 0, "service with empty id");
        if (s.name.empty()) throw SchemaError(corpus_files::services, 0, "service '" + s.id + "' has empty name");
        if (!corpus.service_index_.emplace(s.id, i).second)
            throw SchemaError(corpus_files::services, 0, "duplicate service id '" + s.id + "'");
        for (std::size_t c = 0; c < s.components.size(); ++c) {
            if (s.components[c].id.empty())
                throw SchemaError(corpus_files::services, 0, "service '" + s.id + "' has a component with empty id");
            if (c > 0 && s.components[c].id == s.components[c - 1].id)
                throw SchemaError(corpus_files::services, 0,
                                  "service '" + s.id + "' has duplicate component id '" + s.components[c].id + "'");
        }
    }

    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        const auto& e = p.edges[i];
        if (!corpus.service_index_.count(e.dependent_service_id))
            throw ReferenceError(e.dependent_service_id, "dependency edge dependent_service_id");
        if (!corpus.service_index_.count(e.upstream_service_id))
            throw ReferenceError(e.upstream_service_id, "dependency edge upstream_service_id");
        if (e.dependent_service_id == e.upstream_service_id)
            throw SchemaError(corpus_files::dependencies, 0, "self-edge on service '" + e.dependent_service_id + "'");
        if (i > 0 && e.dependent_service_id == p.edges[i - 1].dependent_service_id &&
            e.upstream_service_id == p.edges[i - 1].upstream_service_id)
            throw SchemaError(corpus_files::dependencies, 0,
                              "duplicate edge " + e.dependent_service_id + " -> " + e.upstream_service_id);
        corpus.upstream_index_[e.dependent_service_id].push_back(corpus.service_index_.at(e.upstream_service_id));
    }

    for (std::size_t i = 0; i < p.incidents.size(); ++i) {
        const auto& inc = p.incidents[i];
        if (inc.id.empty()) throw SchemaError(corpus_files::incidents, 0, "incident with empty id");
        if (inc.title.empty()) throw SchemaError(corpus_files::incidents, 0, "incident '" + inc.id + "' has empty title");
        if (!corpus.incident_index_.emplace(inc.id, i).second)
            throw SchemaError(corpus_files::incidents, 0, "duplicate incident id '" + inc.id + "'");
        if (!corpus.service_index_.count(inc.owning_service_id))
            throw ReferenceError(inc.owning_service_id, "owning_service_id of incident " + inc.id);
    }

    for (std::size_t i = 0; i < p.monitors.size(); ++i) {
        auto& m = p.monitors[i];
        if (m.id.empty()) throw SchemaError(corpus_files::monitors, 0, "monitor with empty id");
        if (m.monitor_name.empty() || m.metric_name.empty())
            throw SchemaError(corpus_files::monitors, 0, "monitor '" + m.id + "' needs monitor_name and metric_name");
        if (!corpus.monitor_index_.emplace(m.id, i).second)
            throw SchemaError(corpus_files::monitors, 0, "duplicate monitor id '" + m.id + "'");
        if (!corpus.service_index_.count(m.service_id))
            throw ReferenceError(m.service_id, "service_id of monitor " + m.id);
        for (auto task : {Task::Resource, Task::Slo}) {
            auto& label = task == Task::Resource ? m.resource_label : m.slo_label;
            if (!label) continue;
            auto canonical = p.ontology.canonical(task, *label);
            if (!canonical)
                throw SchemaError(corpus_files::monitors, 0,
                                  "monitor '" + m.id + "' has unknown " + std::string(to_string(task)) + " label '" +
                                      *label + "'");
            label = std::move(*canonical);
        }
    }
    return corpus;
}

const Service* Corpus::find_service(std::string_view id) const noexcept {
    const auto it = service_index_.find(std::string(id));
    return it == service_index_.end() ? nullptr : &parts_.services[it->second];
}

const Incident* Corpus::find_incident(std::string_view id) const noexcept {
    const auto it = incident_index_.find(std::string(id));
    return it == incident_index_.end() ? nullptr : &parts_.incidents[it->second];
}

const Service& Corpus::service(std::string_view id) const {
    if (const auto* s = find_service(id)) return *s;
    throw ReferenceError(std::string(id), "service");
}

const Incident& Corpus::incident(std::string_view id) const {
    if (const auto* i = find_incident(id)) return *i;
    throw ReferenceError(std::string(id), "incident");
}

const Monitor& Corpus::monitor(std::string_view id) const {
    const auto it = monitor_index_.find(std::string(id));
    if (it == monitor_index_.end()) throw ReferenceError(std::string(id), "monitor");
    return parts_.monitors[it->second];
}

std::vector<const Service*> Corpus::upstream_services(std::string_view service_id) const {
    service(service_id);
    std::vector<const Service*> out;
    const auto it = upstream_index_.find(std::string(service_id));
    if (it == upstream_index_.end()) return out;
    // Edges are sorted by (dependent, upstream) and unique, so this is already ordered and duplicate-free.
    for (auto idx : it->second) out.push_back(&parts_.services[idx]);
    return out;
}

std::vector<const Monitor*> Corpus::labeled_monitors(Task task) const {
    std::vector<const Monitor*> out;
    for (const auto& m : parts_.monitors)
        if (m.label(task)) out.push_back(&m);
    return out;
}

bool Corpus::operator==(const Corpus& other) const {
    return parts_.services == other.parts_.services && parts_.edges == other.parts_.edges &&
           parts_.incidents == other.parts_.incidents && parts_.monitors == other.parts_.monitors &&
           parts_.ontology == other.parts_.ontology;
}

std::vector<const Service*> upstream_services(const Corpus& corpus, std::string_view service_id) {
    return corpus.upstream_services(service_id);
}

std::vector<const Monitor*> labeled_monitors(const Corpus& corpus, Task task) {
    return corpus.labeled_monitors(task);
}

// ---------------------------------------------------------------------------
// File IO

namespace {

/// Strict accessor over one JSONL object: typed getters plus unknown-key detection.
class FieldReader {
  public:
    FieldReader(const json& obj, std::string file, std::size_t line, std::initializer_list<const char*> allowed)
        : obj_(obj), file_(std::move(file)), line_(line) {
        if (!obj_.is_object()) fail("expected a JSON object");
        for (const auto& [key, _] : obj_.items()) {
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
                allowed.end())
                fail("unknown field '" + key + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(file_, line_, what); }

    std::string str(const char* key, bool non_empty = false) const {
        const auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) fail(std::string("missing required field '") + key + "'");
        if (!it->is_string()) fail(std::string("field '") + key + "' must be a string");
        auto value = it->get<std::string>();
        if (non_empty && value.empty()) fail(std::string("field '") + key + "' must be non-empty");
        return value;
    }

    std::optional<std::string> opt_str(const char* key) const {
        const auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) fail(std::string("field '") + key + "' must be a string or null");
        return it->get<std::string>();
    }

    std::optional<bool> opt_bool(const char* key) const {
        const auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return std::nullopt;
        if (!it->is_boolean()) fail(std::string("field '") + key + "' must be a boolean or null");
        return it->get<bool>();
    }

    const json* get(const char* key) const {
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

  private:
    const json& obj_;
    std::string file_;
    std::size_t line_;
};

template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());
    const auto file = path.filename().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(file, line_no, std::string("invalid JSON: ") + e.what());
        }
        fn(obj, file, line_no);
    }
}

Service read_service(const json& obj, const std::string& file, std::size_t line) {
    FieldReader r(obj, file, line, {"id", "name", "description", "summarized_description", "components"});
    Service s;
    s.id = r.str("id", true);
    s.name = r.str("name", true);
    s.description = r.str("description");
    s.summarized_description = r.opt_str("summarized_description");
    if (const auto* comps = r.get("components"); comps && !comps->is_null()) {
        if (!comps->is_array()) r.fail("field 'components' must be an array");
        std::set<std::string> ids;
        for (const auto& c : *comps) {
            FieldReader cr(c, file, line, {"id", "name", "description"});
            Component comp{cr.str("id", true), cr.str("name"), cr.str("description")};
            if (!ids.insert(comp.id).second) r.fail("duplicate component id '" + comp.id + "'");
            s.components.push_back(std::move(comp));
        }
    }
    return s;
}

DependencyEdge read_edge(const json& obj, const std::string& file, std::size_t line) {
    FieldReader r(obj, file, line, {"dependent_service_id", "upstream_service_id", "provenance"});
    DependencyEdge e;
    e.dependent_service_id = r.str("dependent_service_id", true);
    e.upstream_service_id = r.str("upstream_service_id", true);
    const auto prov = r.str("provenance");
    const auto parsed = parse_provenance(prov);
    if (!parsed) r.fail("unknown provenance '" + prov + "'");
    e.provenance = *parsed;
    if (e.dependent_service_id == e.upstream_service_id)
        r.fail("self-edge on service '" + e.dependent_service_id + "'");
    return e;
}

Incident read_incident(const json& obj, const std::string& file, std::size_t line) {
    FieldReader r(obj, file, line,
                  {"id", "title", "raw_summary", "clean_summary", "owning_service_id", "created_at",
                   "ground_truth_root_cause", "clean_root_cause", "is_dependency_failure"});
    Incident inc;
    inc.id = r.str("id", true);
    inc.title = r.str("title", true);
    inc.raw_summary = r.str("raw_summary");
    inc.clean_summary = r.opt_str("clean_summary");
    inc.owning_service_id = r.str("owning_service_id", true);
    const auto ts_text = r.str("created_at");
    const auto ts = parse_timestamp(ts_text);
    if (!ts) r.fail("created_at '" + ts_text + "' is not a UTC timestamp (YYYY-MM-DDTHH:MM:SSZ)");
    inc.created_at = *ts;
    inc.ground_truth_root_cause = r.opt_str("ground_truth_root_cause");
    inc.clean_root_cause = r.opt_str("clean_root_cause");
    inc.is_dependency_failure = r.opt_bool("is_dependency_failure");
    return inc;
}

Monitor read_monitor(const json& obj, const std::string& file, std::size_t line, const Ontology& ontology) {
    FieldReader r(obj, file, line,
                  {"id", "monitor_name", "metric_name", "service_id", "alert_title", "alert_conditions",
                   "resource_label", "slo_label"});
    Monitor m;
    m.id = r.str("id", true);
    m.monitor_name = r.str("monitor_name", true);
    m.metric_name = r.str("metric_name", true);
    m.service_id = r.str("service_id", true);
    m.alert_title = r.str("alert_title");
    m.alert_conditions = r.str("alert_conditions");
    for (auto task : {Task::Resource, Task::Slo}) {
        auto label = r.opt_str(task == Task::Resource ? "resource_label" : "slo_label");
        if (!label) continue;
        auto canonical = ontology.canonical(task, *label);
        if (!canonical) r.fail("unknown " + std::string(to_string(task)) + " label '" + *label + "'");
        (task == Task::Resource ? m.resource_label : m.slo_label) = std::move(canonical);
    }
    return m;
}

Ontology read_ontology(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());
    json obj;
    try {
        obj = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(corpus_files::ontology, 0, std::string("invalid JSON: ") + e.what());
    }
    FieldReader r(obj, corpus_files::ontology, 0, {"resource_classes", "slo_classes"});
    const auto list = [&](const char* key) {
        const auto* v = r.get(key);
        if (!v || !v->is_array()) r.fail(std::string("field '") + key + "' must be an array of strings");
        std::vector<std::string> out;
        for (const auto& item : *v) {
            if (!item.is_string()) r.fail(std::string("field '") + key + "' must be an array of strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    };
    return Ontology(list("resource_classes"), list("slo_classes"));
}

template <class T>
std::vector<T> unique_by_id(std::vector<std::pair<T, std::size_t>> rows, const char* file) {
    std::set<std::string> seen;
    std::vector<T> out;
    for (auto& [item, line] : rows) {
        if (!seen.insert(item.id).second) throw SchemaError(file, line, "duplicate id '" + item.id + "'");
        out.push_back(std::move(item));
    }
    return out;
}

void put_opt(ordered_json& obj, const char* key, const std::optional<std::string>& value) {
    if (value) obj[key] = *value;
}

void write_lines(const std::filesystem::path& path, const std::vector<ordered_json>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& row : rows) out << row.dump() << '\n';
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    for (const char* name : {corpus_files::incidents, corpus_files::services, corpus_files::dependencies,
                             corpus_files::monitors})
        if (!fs::exists(root / name)) throw MissingFile((root / name).string());

    CorpusParts parts;
    if (fs::exists(root / corpus_files::ontology)) parts.ontology = read_ontology(root / corpus_files::ontology);

    std::vector<std::pair<Service, std::size_t>> services;
    for_each_line(root / corpus_files::services, [&](const json& o, const std::string& f, std::size_t l) {
        services.emplace_back(read_service(o, f, l), l);
    });
    parts.services = unique_by_id(std::move(services), corpus_files::services);

    std::set<std::pair<std::string, std::string>> edge_keys;
    for_each_line(root / corpus_files::dependencies, [&](const json& o, const std::string& f, std::size_t l) {
        auto e = read_edge(o, f, l);
        if (!edge_keys.emplace(e.dependent_service_id, e.upstream_service_id).second)
            throw SchemaError(f, l, "duplicate edge " + e.dependent_service_id + " -> " + e.upstream_service_id);
        parts.edges.push_back(std::move(e));
    });

    std::vector<std::pair<Incident, std::size_t>> incidents;
    for_each_line(root / corpus_files::incidents, [&](const json& o, const std::string& f, std::size_t l) {
        incidents.emplace_back(read_incident(o, f, l), l);
    });
    parts.incidents = unique_by_id(std::move(incidents), corpus_files::incidents);

    std::vector<std::pair<Monitor, std::size_t>> monitors;
    for_each_line(root / corpus_files::monitors, [&](const json& o, const std::string& f, std::size_t l) {
        monitors.emplace_back(read_monitor(o, f, l, parts.ontology), l);
    });
    parts.monitors = unique_by_id(std::move(monitors), corpus_files::monitors);

    return Corpus::build(std::move(parts));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    fs::create_directories(root);

    std::vector<ordered_json> rows;
    for (const auto& s : corpus.services()) {
        ordered_json o;
        o["id"] = s.id;
        o["name"] = s.name;
        o["description"] = s.description;
        put_opt(o, "summarized_description", s.summarized_description);
        o["components"] = ordered_json::array();
        for (const auto& c : s.components)
            o["components"].push_back(ordered_json{{"id", c.id}, {"name", c.name}, {"description", c.description}});
        rows.push_back(std::move(o));
    }
    write_lines(root / corpus_files::services, rows);

    rows.clear();
    for (const auto& e : corpus.edges())
        rows.push_back(ordered_json{{"dependent_service_id", e.dependent_service_id},
                                    {"upstream_service_id", e.upstream_service_id},
                                    {"provenance", std::string(to_string(e.provenance))}});
    write_lines(root / corpus_files::dependencies, rows);

    rows.clear();
    for (const auto& i : corpus.incidents()) {
        ordered_json o;
        o["id"] = i.id;
        o["title"] = i.title;
        o["raw_summary"] = i.raw_summary;
        put_opt(o, "clean_summary", i.clean_summary);
        o["owning_service_id"] = i.owning_service_id;
        o["created_at"] = format_timestamp(i.created_at);
        put_opt(o, "ground_truth_root_cause", i.ground_truth_root_cause);
        put_opt(o, "clean_root_cause", i.clean_root_cause);
        if (i.is_dependency_failure) o["is_dependency_failure"] = *i.is_dependency_failure;
        rows.push_back(std::move(o));
    }
    write_lines(root / corpus_files::incidents, rows);

    rows.clear();
    for (const auto& m : corpus.monitors()) {
        ordered_json o;
        o["id"] = m.id;
        o["monitor_name"] = m.monitor_name;
        o["metric_name"] = m.metric_name;
        o["service_id"] = m.service_id;
        o["alert_title"] = m.alert_title;
        o["alert_conditions"] = m.alert_conditions;
        put_opt(o, "resource_label", m.resource_label);
        put_opt(o, "slo_label", m.slo_label);
        rows.push_back(std::move(o));
    }
    write_lines(root / corpus_files::monitors, rows);

    const auto ontology_path = root / corpus_files::ontology;
    if (corpus.ontology().is_builtin()) {
        fs::remove(ontology_path);
    } else {
        ordered_json o;
        o["resource_classes"] = corpus.ontology().resource_classes();
        o["slo_classes"] = corpus.ontology().slo_classes();
        std::ofstream out(ontology_path, std::ios::binary | std::ios::trunc);
        out << o.dump(2) << '\n';
    }
}

}  // namespace xlc
