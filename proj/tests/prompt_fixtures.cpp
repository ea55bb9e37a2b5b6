#include "prompt_fixtures.hpp"

#include "support.hpp"

#include <cstdlib>

namespace testing {

using namespace xlc;
using namespace xlc::prompt;

PromptInputs prompt_inputs() {
    PromptInputs in;
    in.service = service("svc-ledger", "LedgerService",
                         "LedgerService records   billing transactions\nfor tenant subscriptions.");
    in.service.summarized_description =
        "LedgerService records billing transactions for tenant subscriptions and exposes them to invoicing.";
    in.service.components = {{"c1", "LedgerWriter", "Appends transactions to the partitioned ledger store."},
                             {"c2", "ReconcileJob", "Nightly job that checks ledger totals against payments."}};

    in.incident = incident("inc-0042", "svc-ledger", "Ledger writes failing in West Europe",
                           "<p>Writes to the ledger store return <b>HTTP 503</b>.</p>");
    in.incident.clean_summary = "Ledger writes return HTTP 503 in West Europe since 09:10 UTC; retries exhaust.";

    in.upstream = {{"PartitionStore", "Provides partitioned key-value storage for transactional services."},
                   {"IdentityGateway", "Issues service-to-service tokens for internal callers."},
                   {"QuotaBroker", "Tracks per-tenant resource quotas."}};

    in.examples = {
        {"Ledger write latency spike", "Writes to the ledger took over 5 s for 20 minutes.",
         "A hot partition in PartitionStore throttled writes."},
        {"Invoices missing transactions", "Invoices generated without the last day of transactions.",
         "ReconcileJob ran against a stale replica after a failover."},
        {"Token refresh failures", "Callers failed to refresh tokens for LedgerService.",
         "IdentityGateway certificate rotation was incomplete."},
        {"Quota exceeded errors", "Tenants saw quota errors when posting transactions.",
         "QuotaBroker cached an outdated quota policy."},
        {"Ledger API 500s after deploy", "The ledger API returned 500 after a deployment.",
         "A configuration flag referenced a removed setting."},
    };

    in.monitor.id = "mon-0007";
    in.monitor.monitor_name = "LedgerDataFreshnessMonitor";
    in.monitor.metric_name = "ledger_dataFreshnessInSeconds";
    in.monitor.service_id = "svc-ledger";
    in.monitor.alert_title = "Ledger data older than threshold";
    in.monitor.alert_conditions = "max(dataFreshnessInSeconds) > 900 over 10 minutes";
    return in;
}

std::vector<Golden> rca_goldens() {
    const auto in = prompt_inputs();
    std::vector<Golden> out;
    for (auto s : kAllStrategies) {
        for (bool with_upstream : {true, false}) {
            const std::span<const UpstreamInfo> up =
                with_upstream ? std::span<const UpstreamInfo>(in.upstream) : std::span<const UpstreamInfo>{};
            const std::span<const Example> ex =
                uses_examples(s) ? std::span<const Example>(in.examples) : std::span<const Example>{};
            out.push_back({"rca/" + std::string(to_string(s)) + (with_upstream ? "_upstream" : "_no_upstream") + ".txt",
                           build_rca_prompt(s, in.incident, in.service, up, ex, kMaxExamples, with_upstream)});
        }
    }
    return out;
}

std::vector<Golden> monitor_goldens() {
    const auto in = prompt_inputs();
    std::vector<Golden> out;
    for (auto task : {Task::Resource, Task::Slo})
        for (auto c : kAllCases)
            out.push_back({"monitor/" + std::string(to_string(task)) + "_" + std::string(to_string(c)) + ".txt",
                           build_monitor_prompt(task, c, in.monitor, in.service)});
    return out;
}

std::vector<std::string> check_goldens(const std::vector<Golden>& goldens, const std::filesystem::path& dir) {
    const char* update = std::getenv("XLC_UPDATE_GOLDENS");
    std::vector<std::string> mismatched;
    for (const auto& g : goldens) {
        const auto file = dir / g.name;
        if (update && std::string(update) == "1") {
            write_text(file, g.prompt.text);
            continue;
        }
        if (!std::filesystem::exists(file) || read_text(file) != g.prompt.text) mismatched.push_back(g.name);
    }
    return mismatched;
}

}  // namespace testing
