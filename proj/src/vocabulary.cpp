#include "xlc/vocabulary.hpp"

#include "xlc/text.hpp"

#include <cctype>
#include <sstream>

namespace xlc::vocabulary {

const std::vector<ClassVocabulary>& classes(Task task) {
    static const std::vector<ClassVocabulary> resource = {
        {"API", {"api", "endpoint", "rest", "http"}, {"ApiEndpoint", "RestApi", "HttpEndpoint"},
         {"apiCalls", "endpointRequests", "httpRequests"}},
        {"Dependency", {"dependency", "downstream", "partner", "external"},
         {"PartnerDependency", "DownstreamCall", "ExternalDependency"},
         {"dependencyCalls", "partnerRequests", "downstreamCalls"}},
        {"Compute cluster", {"cluster", "node", "nodes", "vm", "compute", "scale set"},
         {"ComputeCluster", "NodePool", "VmScaleSet"}, {"clusterNodes", "nodeHealth", "vmInstances"}},
        {"Service level", {"service level", "service health", "scenario", "end to end"},
         {"ServiceLevel", "EndToEndScenario", "ServiceHealth"},
         {"serviceLevelIndicator", "scenarioOutcome", "serviceHealthScore"}},
        {"Cache-memory", {"cache", "redis", "memcached"}, {"RedisCache", "CacheMemory", "Memcached"},
         {"cacheHits", "redisMemory", "cacheEvictions"}},
        {"Ram-memory", {"ram", "heap", "working set", "physical memory"}, {"RamUsage", "HeapMemory", "WorkingSet"},
         {"ramBytes", "heapBytes", "workingSetBytes"}},
        {"CPU", {"cpu", "processor", "cores"}, {"HostCpu", "CpuUsage", "ProcessorTime"},
         {"cpuPercent", "processorTime", "cpuCores"}},
        {"Paging memory", {"paging", "page file", "pagefile", "page faults", "swap"},
         {"PageFile", "PagingMemory", "SwapUsage"}, {"pageFaults", "pagefileUsage", "swapBytes"}},
        {"Container", {"container", "pod", "kubernetes", "docker", "k8s"},
         {"ContainerPod", "KubernetesPod", "DockerContainer"}, {"podRestarts", "containerCount", "podStatus"}},
        {"IO", {"io", "disk io", "iops", "read write"}, {"DiskIo", "IoOperations", "ReadWriteOps"},
         {"iops", "ioWaitMs", "diskReadWrite"}},
        {"Storage", {"storage", "blob", "disk space", "database", "sql"},
         {"BlobStorage", "StorageAccount", "DatabaseStorage"}, {"storageUsedBytes", "blobCount", "dbSizeGb"}},
        {"Certificate", {"certificate", "cert", "ssl", "tls", "expiry"},
         {"CertificateExpiry", "SslCert", "TlsCertificate"},
         {"certDaysToExpiry", "certificateValidity", "tlsHandshake"}},
        {"None-of-the-above", {}, {"GenericCheck", "CustomSignal", "MiscProbe"},
         {"customValue", "genericCount", "probeResult"}},
    };
    static const std::vector<ClassVocabulary> slo = {
        {"Availability", {"availability", "uptime", "available", "heartbeat"},
         {"Availability", "Uptime", "Heartbeat"}, {"availabilityPercent", "uptimeRatio", "heartbeatCount"}},
        {"Capacity", {"capacity", "quota", "utilization", "headroom", "saturation"},
         {"Capacity", "QuotaUsage", "Utilization"}, {"capacityPercent", "quotaUsed", "utilizationRatio"}},
        {"Freshness", {"freshness", "staleness", "stale", "lag", "age"}, {"Freshness", "DataStaleness", "IngestionLag"},
         {"dataFreshnessInSeconds", "stalenessMinutes", "lagSeconds"}},
        {"Interruption Rate", {"interruption", "interruptions", "disconnects", "dropped", "drop rate"},
         {"Interruption", "DroppedSessions", "Disconnects"},
         {"interruptionRate", "droppedSessionCount", "disconnectRate"}},
        {"Latency", {"latency", "duration", "response time", "p99", "p95"}, {"Latency", "ResponseTime", "P99Duration"},
         {"latencyMs", "responseTimeMs", "p95DurationMs"}},
        {"Others", {}, {"Check", "Signal", "Probe"}, {"checkValue", "signalState", "probeOutcome"}},
        {"Reliability", {"reliability", "errors", "error rate", "failures", "exceptions"},
         {"Reliability", "ErrorRate", "Exceptions"}, {"errorCount", "failureRate", "exceptionCount"}},
        {"Success Rate", {"success rate", "success", "succeeded", "qos", "successful"},
         {"SuccessRate", "QosSuccess", "Succeeded"}, {"successRate", "qosSuccessRatio", "succeededCount"}},
        {"Throughput", {"throughput", "requests per second", "rps", "volume", "messages per second"},
         {"Throughput", "RequestsPerSecond", "MessageVolume"}, {"throughputRps", "requestsPerSecond", "messageVolume"}},
    };
    return task == Task::Resource ? resource : slo;
}

const ClassVocabulary* find(Task task, std::string_view label) {
    const auto key = text::label_key(label);
    for (const auto& entry : classes(task))
        if (text::label_key(entry.label) == key) return &entry;
    return nullptr;
}

std::vector<std::string> split_identifiers(std::string_view input) {
    std::string spaced;
    spaced.reserve(input.size() * 2);
    const auto lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
    const auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t i = 0; i < input.size(); ++i) {
        const char c = input[i];
        if (i > 0) {
            const char prev = input[i - 1];
            const char next = i + 1 < input.size() ? input[i + 1] : '\0';
            // fooBar | 9Bar | HTTPServer -> HTTP Server
            if (upper(c) && (lower(prev) || std::isdigit(static_cast<unsigned char>(prev)) ||
                             (upper(prev) && lower(next))))
                spaced.push_back(' ');
        }
        spaced.push_back(c == '_' ? ' ' : c);
    }
    return text::tokenize(spaced);
}

std::size_t keyword_hits(const std::vector<std::string>& tokens, const ClassVocabulary& vocab) {
    std::size_t hits = 0;
    for (const auto keyword : vocab.keywords) {
        const auto parts = text::tokenize(keyword);
        if (parts.empty() || parts.size() > tokens.size()) continue;
        for (std::size_t i = 0; i + parts.size() <= tokens.size(); ++i) {
            bool match = true;
            for (std::size_t k = 0; k < parts.size() && match; ++k) match = tokens[i + k] == parts[k];
            if (match) ++hits;
        }
    }
    return hits;
}

}  // namespace xlc::vocabulary
