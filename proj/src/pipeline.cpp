#include "xlc/pipeline.hpp"

#include "xlc/error.hpp"
#include "xlc/hash.hpp"
#include "xlc/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

namespace xlc::pipeline {

namespace {

std::string root_cause_text(const Incident& inc, const sanitize::CleanOptions& clean) {
    if (inc.clean_root_cause) return *inc.clean_root_cause;
    return sanitize::clean_text(*inc.ground_truth_root_cause, clean).text;
}

std::string upstream_description(const Service& s, const sanitize::CleanOptions& clean) {
    if (s.summarized_description) return *s.summarized_description;
    return sanitize::clean_text(s.description, clean).text;
}

std::string describe(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

}  // namespace

PreparedRca prepare_rca(const RcaContext& ctx, std::string_view incident_id, prompt::RcaStrategy strategy) {
    const auto& incident = ctx.corpus.incident(incident_id);
    const auto& owner = ctx.corpus.service(incident.owning_service_id);

    PreparedRca out;
    std::vector<prompt::Example> examples;
    std::size_t pool = 0;
    if (prompt::uses_examples(strategy)) {
        if (!ctx.index || !ctx.embedder)
            throw PreconditionError("strategy " + std::string(prompt::to_string(strategy)) + " needs an index");
        std::set<std::string> exclude{incident.id};
        for (const auto& e : ctx.index->entries()) {
            const auto* other = ctx.corpus.find_incident(e.incident_id);
            if (!other) throw ReferenceError(e.incident_id, "index entry not in corpus; rebuild the index");
            if (!other->ground_truth_root_cause) exclude.insert(e.incident_id);
        }
        pool = ctx.index->size() - std::count_if(ctx.index->entries().begin(), ctx.index->entries().end(),
                                                 [&](const auto& e) { return exclude.count(e.incident_id) > 0; });
        if (pool > 0) {
            const auto k = std::min(ctx.options.k, prompt::kMaxExamples);
            for (const auto& n :
                 retrieval::top_k(*ctx.index, *ctx.embedder, retrieval::embedding_text(incident), k, exclude)) {
                const auto& ex = ctx.corpus.incident(n.incident_id);
                examples.push_back({ex.title, retrieval::incident_summary_text(ex), root_cause_text(ex, ctx.options.clean)});
                out.examples_used.push_back(ex.id);
            }
        }
    }
    std::vector<prompt::UpstreamInfo> upstream;
    if (prompt::uses_upstream(strategy))
        for (const auto* s : ctx.corpus.upstream_services(owner.id))
            upstream.push_back({s->name, upstream_description(*s, ctx.options.clean)});

    out.prompt = prompt::build_rca_prompt(strategy, incident, owner, upstream, examples, pool, !upstream.empty());
    return out;
}

void apply_rca_response(RcaRunRecord& record, std::string_view response) {
    try {
        const auto answer = prompt::parse_rca_response(response);
        record.predicted_root_cause = answer.root_cause;
        record.predicted_dependency = answer.is_dependency_failure;
        record.parse_error.reset();
    } catch (const ParseError& e) {
        record.predicted_root_cause.clear();
        record.predicted_dependency.reset();
        record.parse_error = to_string(e.kind());
    }
}

namespace {

RcaRunRecord blank_record(std::string_view id, prompt::RcaStrategy strategy, llm::ProviderKind kind) {
    RcaRunRecord r;
    r.incident_id = std::string(id);
    r.strategy = strategy;
    r.provider = kind;
    return r;
}

}  // namespace

namespace {

std::vector<RcaRunRecord> execute_rca(const RcaContext& ctx, const llm::Gateway& gateway,
                                      prompt::RcaStrategy strategy, std::span<const std::string> eval_ids) {
    for (const auto& id : eval_ids) ctx.corpus.incident(id);

    const auto kind = gateway.provider().kind();
    std::vector<RcaRunRecord> records;
    std::vector<llm::CompletionRequest> requests;
    std::vector<std::size_t> slots;
    records.reserve(eval_ids.size());
    for (const auto& id : eval_ids) {
        auto rec = blank_record(id, strategy, kind);
        try {
            auto prepared = prepare_rca(ctx, id, strategy);
            rec.prompt_hash = prepared.prompt.hash_hex();
            rec.examples_used = std::move(prepared.examples_used);
            requests.push_back({ctx.options.model, std::move(prepared.prompt.text), 0.0, ctx.options.max_output_tokens});
            slots.push_back(records.size());
        } catch (const ReferenceError&) {
            throw;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }

    const auto outcomes = gateway.complete_all(requests);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& rec = records[slots[i]];
        rec.elapsed_ms = outcomes[i].elapsed.count();
        if (outcomes[i].ok()) apply_rca_response(rec, outcomes[i].text);
        else rec.error = describe(outcomes[i].error);
    }
    return records;
}

template <class Record>
void require_some_success(const std::vector<Record>& records) {
    if (!records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return !r.ok(); }))
        throw BatchError("all " + std::to_string(records.size()) + " runs failed; first error: " + *records.front().error);
}

}  // namespace

RcaRunRecord run_rca(const RcaContext& ctx, llm::Provider& provider, std::string_view incident_id,
                     prompt::RcaStrategy strategy) {
    const std::string ids[] = {std::string(incident_id)};
    return std::move(execute_rca(ctx, llm::Gateway(provider, 1), strategy, ids).front());
}

std::vector<RcaRunRecord> run_rca_batch(const RcaContext& ctx, const llm::Gateway& gateway,
                                        prompt::RcaStrategy strategy, std::span<const std::string> eval_ids) {
    auto records = execute_rca(ctx, gateway, strategy, eval_ids);
    require_some_success(records);
    return records;
}

std::vector<MonitorRunRecord> run_monitor_batch(const Corpus& corpus, const llm::Gateway& gateway, Task task,
                                                prompt::MonitorCase c, const MonitorOptions& options,
                                                const std::vector<std::string>* only) {
    auto monitors = corpus.labeled_monitors(task);
    if (monitors.empty())
        throw PreconditionError("no monitors carry a " + std::string(to_string(task)) + " label");
    if (only) {
        const std::set<std::string> keep(only->begin(), only->end());
        std::erase_if(monitors, [&](const Monitor* m) { return !keep.count(m->id); });
    }

    std::vector<MonitorRunRecord> records;
    std::vector<llm::CompletionRequest> requests;
    records.reserve(monitors.size());
    for (const auto* m : monitors) {
        const auto rendered = prompt::build_monitor_prompt(task, c, *m, corpus.service(m->service_id), corpus.ontology());
        MonitorRunRecord rec;
        rec.monitor_id = m->id;
        rec.task = task;
        rec.monitor_case = c;
        rec.prompt_hash = rendered.hash_hex();
        rec.provider = gateway.provider().kind();
        records.push_back(std::move(rec));
        requests.push_back({options.model, rendered.text, 0.0, options.max_output_tokens});
    }
    const auto outcomes = gateway.complete_all(requests);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        records[i].elapsed_ms = outcomes[i].elapsed.count();
        if (outcomes[i].ok()) records[i].predicted = prompt::parse_monitor_response(outcomes[i].text, task, corpus.ontology());
        else records[i].error = describe(outcomes[i].error);
    }
    require_some_success(records);
    return records;
}

std::vector<RcaRunRecord> merge_rca_runs(const std::vector<RcaRunRecord>& existing,
                                         const std::vector<RcaRunRecord>& fresh, prompt::RcaStrategy strategy,
                                         std::span<const std::string> eval_ids) {
    std::map<std::string, const RcaRunRecord*> chosen;
    for (const auto& r : existing)
        if (r.strategy == strategy) chosen[r.incident_id] = &r;
    for (const auto& r : fresh) chosen[r.incident_id] = &r;

    std::vector<RcaRunRecord> out;
    for (auto s : prompt::kAllStrategies) {
        if (s != strategy) {
            for (const auto& r : existing)
                if (r.strategy == s) out.push_back(r);
            continue;
        }
        std::set<std::string> emitted;
        for (const auto& id : eval_ids) {
            const auto it = chosen.find(id);
            if (it != chosen.end() && emitted.insert(id).second) out.push_back(*it->second);
        }
        for (const auto& [id, r] : chosen)
            if (emitted.insert(id).second) out.push_back(*r);
    }
    return out;
}

std::vector<MonitorRunRecord> merge_monitor_runs(const std::vector<MonitorRunRecord>& existing,
                                                 const std::vector<MonitorRunRecord>& fresh, Task task,
                                                 prompt::MonitorCase c) {
    std::map<std::tuple<int, int, std::string>, MonitorRunRecord> rows;
    const auto key = [](const MonitorRunRecord& r) {
        return std::tuple(static_cast<int>(r.task), static_cast<int>(r.monitor_case), r.monitor_id);
    };
    for (const auto& r : existing) rows[key(r)] = r;
    for (const auto& r : fresh) {
        if (r.task != task || r.monitor_case != c) throw PreconditionError("fresh record outside the merged block");
        rows[key(r)] = r;
    }
    std::vector<MonitorRunRecord> out;
    out.reserve(rows.size());
    for (auto& [k, r] : rows) out.push_back(std::move(r));
    return out;
}

// ---------------------------------------------------------------------------

SummaryCache SummaryCache::load(const std::filesystem::path& file) {
    SummaryCache cache;
    std::ifstream in(file, std::ios::binary);
    if (!in) return cache;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            cache.put(j.at("key").get<std::string>(), j.at("summary").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(file.filename().string(), n, e.what());
        }
    }
    return cache;
}

void SummaryCache::save(const std::filesystem::path& file) const {
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        for (const auto& [k, v] : entries_) out << nlohmann::ordered_json{{"key", k}, {"summary", v}}.dump() << '\n';
    }
    std::filesystem::rename(tmp, file);
}

const std::string* SummaryCache::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void SummaryCache::put(std::string key, std::string summary) { entries_[std::move(key)] = std::move(summary); }

std::string SummaryCache::key(std::string_view kind, std::string_view raw_text) {
    std::string material(kind);
    material += '\n';
    material += raw_text;
    return to_hex(fnv1a64(material));
}

Corpus summarize_corpus(const Corpus& corpus, llm::Provider& provider, SummaryCache& cache,
                        const llm::SummarizeOptions& options, const sanitize::CleanOptions& clean,
                        SummarizeStats* stats) {
    SummarizeStats local;
    auto& st = stats ? *stats : local;
    const std::string suffix = "|" + options.model + "|" + std::to_string(clean.stack_trace_limit);

    const auto cached = [&](std::string_view kind, std::string_view raw, auto&& produce) {
        auto k = SummaryCache::key(std::string(kind) + suffix, raw);
        if (const auto* hit = cache.find(k)) {
            ++st.cached;
            return *hit;
        }
        auto value = produce();
        ++st.generated;
        cache.put(std::move(k), value);
        return value;
    };

    auto parts = corpus.parts();
    for (auto& s : parts.services) {
        if (text::trim(s.description).empty()) continue;
        s.summarized_description = cached("service", s.description, [&] {
            const Service one[] = {s};
            return llm::summarize_service_descriptions(provider, one, options).summary;
        });
    }
    for (auto& inc : parts.incidents) {
        inc.clean_summary = cached("incident.summary", inc.title + "\n" + inc.raw_summary, [&] {
            const auto cleaned = sanitize::clean_text(inc.raw_summary, clean).text;
            const auto prompt = llm::render_incident_summary_prompt(llm::IncidentField::summary,
                                                                    cleaned.empty() ? inc.title : cleaned);
            return std::string(text::trim(llm::complete(provider, {options.model, prompt, 0.0, options.max_output_tokens})));
        });
        if (inc.ground_truth_root_cause) {
            inc.clean_root_cause = cached("incident.root_cause", *inc.ground_truth_root_cause, [&] {
                const auto cleaned = sanitize::clean_text(*inc.ground_truth_root_cause, clean).text;
                const auto prompt = llm::render_incident_summary_prompt(llm::IncidentField::root_cause,
                                                                        cleaned.empty() ? inc.title : cleaned);
                return std::string(
                    text::trim(llm::complete(provider, {options.model, prompt, 0.0, options.max_output_tokens})));
            });
        } else {
            inc.clean_root_cause.reset();
        }
    }
    return Corpus::build(std::move(parts));
}

}  // namespace xlc::pipeline
