#include "xlc/synth.hpp"

#include "xlc/error.hpp"
#include "xlc/text.hpp"
#include "xlc/vocabulary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string_view>

namespace xlc::synth {

void SynthSpec::validate() const {
    if (n_services < 2) throw SpecError("n_services must be at least 2 to form a dependency graph");
    if (n_incidents == 0) throw SpecError("n_incidents must be positive");
    if (n_monitors == 0) throw SpecError("n_monitors must be positive");
    if (!(dependency_failure_fraction >= 0.0 && dependency_failure_fraction <= 1.0))
        throw SpecError("dependency_failure_fraction must lie in [0, 1]");
    if (!(edge_density > 0.0 && edge_density <= 1.0)) throw SpecError("edge_density must lie in (0, 1]");
}

std::size_t slo_labeled_count(std::size_t n_monitors) noexcept {
    return static_cast<std::size_t>(std::llround(static_cast<double>(n_monitors) * 180.0 / 260.0));
}

std::vector<std::size_t> quota(const SynthSpec& spec, Task task) {
    const std::size_t classes = task == Task::Resource ? Ontology::kResourceCount : Ontology::kSloCount;
    const std::size_t labeled = task == Task::Resource ? spec.n_monitors : slo_labeled_count(spec.n_monitors);
    std::vector<std::size_t> out(classes, labeled / classes);
    for (std::size_t i = 0; i < labeled % classes; ++i) ++out[i];
    return out;
}

namespace {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n).
    std::size_t below(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do x = engine_();
        while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    template <class T>
    const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

    template <class T, std::size_t N>
    const T& pick(const std::array<T, N>& v) { return v[below(N)]; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

  private:
    std::mt19937_64 engine_;
};

std::string numbered(const char* prefix, std::size_t i, int width) {
    auto digits = std::to_string(i);
    if (digits.size() < static_cast<std::size_t>(width)) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    return std::string(prefix) + "-" + digits;
}

int width_for(std::size_t n) {
    int w = 1;
    for (std::size_t v = n; v >= 10; v /= 10) ++w;
    return std::max(w, 3);
}

constexpr std::array<std::string_view, 20> kNamePrefix = {
    "Orion", "Atlas", "Nimbus", "Vega",  "Helix", "Quartz", "Aurora", "Zephyr", "Cobalt", "Falcon",
    "Lumen", "Mosaic", "Nova",  "Pulse", "Ridge", "Sierra", "Tundra", "Umbra",  "Vertex", "Willow"};
constexpr std::array<std::string_view, 10> kNameSuffix = {"Ledger", "Router", "Broker", "Vault",  "Relay",
                                                          "Portal", "Engine", "Hub",    "Beacon", "Forge"};

constexpr std::array<std::string_view, 8> kFunctions = {
    "routes customer requests to regional backends",
    "issues and validates access tokens for tenant applications",
    "aggregates billing events into monthly invoices",
    "stores tenant configuration documents",
    "schedules background jobs for partner integrations",
    "delivers notification messages to mobile clients",
    "indexes telemetry records for search",
    "synchronizes directory objects across regions",
};
constexpr std::array<std::string_view, 6> kResources = {
    "a fleet of stateless front doors", "a set of sharded document tables", "a pool of queue consumers",
    "regional key stores",              "a replicated metadata store",      "a set of worker roles",
};
constexpr std::array<std::string_view, 5> kComponentRoles = {"Frontend", "Worker", "Scheduler", "Indexer", "Sync"};
constexpr std::array<std::string_view, 5> kComponentDuties = {
    "accepts inbound calls and forwards them to internal handlers",
    "processes queued work items in batches",
    "triggers periodic maintenance tasks",
    "maintains lookup tables used by request handlers",
    "replicates state to secondary regions",
};

constexpr std::array<std::string_view, 6> kSymptoms = {
    "Elevated request failures", "Timeouts on write operations", "Degraded sign-in experience",
    "Spike in HTTP 503 responses", "Delayed message delivery",   "Intermittent authentication errors",
};
constexpr std::array<std::string_view, 5> kUpstreamFaults = {
    "a bad configuration rollout", "an expired signing key", "a throttling storm after a regional failover",
    "a partial outage of its storage tier", "a deployment that exhausted its connection pool",
};
constexpr std::array<std::string_view, 5> kOwnFaults = {
    "a code regression in the latest deployment", "a misconfigured feature flag",
    "an unhandled null reference in a request handler", "a schema migration that locked a hot table",
    "a memory leak in a background worker",
};

std::string stack_trace(std::string_view service) {
    std::string out = "Exception: System.TimeoutException: The operation timed out\n";
    const char* frames[] = {"HandleRequest", "SendAsync", "ExecuteWithRetry", "InvokeDownstream", "ProcessBatch",
                            "Run"};
    for (const char* f : frames)
        out += "    at " + std::string(service) + ".Core." + f + "(RequestContext ctx)\n";
    return out;
}

struct SynthService {
    Service service;
    bool faulty = false;
    bool exposed = false;
};

}  // namespace

Corpus generate_corpus(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const auto n = spec.n_services;
    const int sw = width_for(n);

    // Services
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t n_faulty = std::max<std::size_t>(1, n / 10);
    const std::size_t n_exposed = std::max<std::size_t>(1, (n - n_faulty + 1) / 2);

    std::vector<SynthService> services(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = services[i].service;
        s.id = numbered("svc", i + 1, sw);
        s.name = std::string(kNamePrefix[i % kNamePrefix.size()]) +
                 std::string(kNameSuffix[(i / kNamePrefix.size()) % kNameSuffix.size()]);
        if (i >= kNamePrefix.size() * kNameSuffix.size()) s.name += std::to_string(i / (kNamePrefix.size() * kNameSuffix.size()) + 1);
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (r < n_faulty) services[order[r]].faulty = true;
        else if (r < n_faulty + n_exposed) services[order[r]].exposed = true;
    }
    for (auto& ss : services) {
        auto& s = ss.service;
        std::string desc;
        if (ss.faulty) desc += "faulty: " + s.name + ". ";
        desc += s.name + " " + std::string(rng.pick(kFunctions)) + ". It operates " + std::string(rng.pick(kResources)) +
                ". Teams integrate with it through a versioned client library.";
        s.description = desc;
        const std::size_t n_comp = 1 + rng.below(3);
        std::vector<std::size_t> roles{0, 1, 2, 3, 4};
        rng.shuffle(roles);
        for (std::size_t c = 0; c < n_comp; ++c) {
            Component comp;
            comp.id = s.id + "-c" + std::to_string(c + 1);
            comp.name = s.name + std::string(kComponentRoles[roles[c]]);
            comp.description = "The " + std::string(kComponentRoles[roles[c]]) + " component " +
                               std::string(kComponentDuties[roles[c]]) + ".";
            s.components.push_back(std::move(comp));
        }
    }

    // Dependency edges: mostly from later to earlier services.
    std::vector<DependencyEdge> edges;
    constexpr Provenance kProvenances[] = {Provenance::shared_subscription, Provenance::dns_log,
                                           Provenance::shared_resource, Provenance::declared};
    std::vector<std::size_t> faulty_ids;
    for (std::size_t i = 0; i < n; ++i)
        if (services[i].faulty) faulty_ids.push_back(i);
    std::vector<std::size_t> faulty_upstream(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double p = j < i ? spec.edge_density : spec.edge_density * 0.1;
            const bool draw = rng.chance(p);
            const auto prov = kProvenances[rng.below(4)];
            if (!draw || services[j].faulty) continue;
            edges.push_back({services[i].service.id, services[j].service.id, prov});
        }
        if (services[i].exposed) {
            const auto f = rng.pick(faulty_ids);
            faulty_upstream[i] = f;
            edges.push_back({services[i].service.id, services[f].service.id, kProvenances[rng.below(4)]});
        }
    }

    // Incidents
    std::vector<std::size_t> exposed, clean;
    for (std::size_t i = 0; i < n; ++i) (services[i].exposed ? exposed : clean).push_back(i);

    const auto n_df = static_cast<std::size_t>(std::llround(spec.dependency_failure_fraction *
                                                            static_cast<double>(spec.n_incidents)));
    std::vector<bool> is_df(spec.n_incidents, false);
    for (std::size_t i = 0; i < n_df; ++i) is_df[i] = true;
    rng.shuffle(is_df);

    const int iw = std::max(4, width_for(spec.n_incidents));
    const auto base = std::chrono::sys_days{std::chrono::year{2023} / 1 / 1};
    std::vector<Incident> incidents;
    for (std::size_t k = 0; k < spec.n_incidents; ++k) {
        Incident inc;
        inc.id = numbered("inc", k + 1, iw);
        inc.created_at = Timestamp{base} + std::chrono::hours{static_cast<long>(k) * 7};
        const bool df = is_df[k];
        const auto owner = df ? rng.pick(exposed) : rng.pick(clean);
        const auto& os = services[owner].service;
        inc.owning_service_id = os.id;
        const auto symptom = std::string(rng.pick(kSymptoms));
        inc.title = symptom + " in " + os.name;

        std::string raw = "<p>Monitoring detected " + text::to_lower_ascii(symptom) + " for " + os.name + ".</p>";
        raw += "<div>Customer impact started at " + format_timestamp(inc.created_at) +
               " and affected requests in several regions.</div>";
        if (rng.chance(0.4))
            raw += "<table><tr><th>Region</th><th>Errors</th></tr><tr><td>west</td><td>" +
                   std::to_string(100 + rng.below(900)) + "</td></tr></table>";
        if (rng.chance(0.5)) raw += "\n" + stack_trace(os.name);
        raw += "<br/>The on-call engineer engaged the owning team for " + os.name + ".";
        inc.raw_summary = raw;

        if (df) {
            const auto& up = services[faulty_upstream[owner]].service;
            inc.ground_truth_root_cause = "Upstream service " + up.name + " failed due to " +
                                          std::string(rng.pick(kUpstreamFaults)) + ", and " + os.name +
                                          " calls to it returned errors.";
        } else {
            inc.ground_truth_root_cause = "The incident was caused by " + std::string(rng.pick(kOwnFaults)) +
                                          " in " + os.name + ".";
        }
        inc.is_dependency_failure = df;
        incidents.push_back(std::move(inc));
    }

    // Monitors
    const auto& res_vocab = vocabulary::classes(Task::Resource);
    const auto& slo_vocab = vocabulary::classes(Task::Slo);
    const auto n_slo = slo_labeled_count(spec.n_monitors);
    const int mw = std::max(4, width_for(spec.n_monitors));
    std::vector<Monitor> monitors;
    for (std::size_t k = 0; k < spec.n_monitors; ++k) {
        const auto& rv = res_vocab[k % res_vocab.size()];
        Monitor m;
        m.id = numbered("mon", k + 1, mw);
        m.service_id = services[rng.below(n)].service.id;
        m.resource_label = std::string(rv.label);
        std::string name(rv.name_fragments[rng.below(rv.name_fragments.size())]);
        std::string metric(rv.metric_fragments[rng.below(rv.metric_fragments.size())]);
        if (k < n_slo) {
            const auto& sv = slo_vocab[k % slo_vocab.size()];
            m.slo_label = std::string(sv.label);
            name += std::string(sv.name_fragments[rng.below(sv.name_fragments.size())]);
            metric += "_" + std::string(sv.metric_fragments[rng.below(sv.metric_fragments.size())]);
        }
        m.monitor_name = name + "Monitor";
        m.metric_name = metric;
        m.alert_title = m.monitor_name + " threshold breached";
        m.alert_conditions = "avg(" + metric + ") > " + std::to_string(10 + rng.below(90)) + " over 5 minutes";
        monitors.push_back(std::move(m));
    }

    CorpusParts parts;
    for (auto& ss : services) parts.services.push_back(std::move(ss.service));
    parts.edges = std::move(edges);
    parts.incidents = std::move(incidents);
    parts.monitors = std::move(monitors);
    return Corpus::build(std::move(parts));
}

Corpus generate(const SynthSpec& spec, const std::filesystem::path& dir) {
    auto corpus = generate_corpus(spec);
    save_corpus(corpus, dir);
    return corpus;
}

}  // namespace xlc::synth
