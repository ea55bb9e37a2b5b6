#include "support.hpp"

#include "xlc/error.hpp"
#include "xlc/llm.hpp"
#include "xlc/pipeline.hpp"
#include "xlc/records.hpp"
#include "xlc/report.hpp"
#include "xlc/retrieval.hpp"
#include "xlc/synth.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <set>

using namespace xlc;
using prompt::RcaStrategy;

namespace {

Corpus small_synth(std::uint64_t seed = 3, std::size_t incidents = 60) {
    synth::SynthSpec spec;
    spec.seed = seed;
    spec.n_services = 20;
    spec.n_incidents = incidents;
    spec.n_monitors = 52;
    return synth::generate_corpus(spec);
}

bool is_faulty(const Service& s) { return s.description.rfind("faulty: ", 0) == 0; }

std::size_t faulty_upstreams(const Corpus& c, const std::string& service_id) {
    std::size_t n = 0;
    for (const auto* up : c.upstream_services(service_id)) n += is_faulty(*up);
    return n;
}

/// Counts calls and fails every `fail_every`-th one (0 = never).
class CountingProvider final : public llm::Provider {
  public:
    explicit CountingProvider(std::size_t fail_every = 0) : fail_every_(fail_every) {}
    llm::ProviderKind kind() const noexcept override { return llm::ProviderKind::rule_stub; }
    llm::Completion send(const llm::CompletionRequest& request) override {
        const auto n = ++calls;
        if (fail_every_ && n % fail_every_ == 0) throw ProviderError(503, "injected failure");
        return {llm::RuleStubProvider::respond(request.prompt), std::nullopt};
    }
    std::atomic<std::size_t> calls{0};

  private:
    std::size_t fail_every_;
};

struct Fixture {
    Corpus corpus = small_synth();
    HashingEmbedder embedder = retrieval::corpus_embedder(corpus);
    retrieval::Index index = retrieval::build_index(corpus, embedder).index;
    pipeline::RcaContext ctx() const { return {corpus, &index, &embedder, {}}; }

    std::vector<std::string> ids(std::size_t n) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n && i < corpus.incidents().size(); ++i) out.push_back(corpus.incidents()[i].id);
        return out;
    }
};

RcaRunRecord rec(std::string id, RcaStrategy s, std::string cause = "x") {
    RcaRunRecord r;
    r.incident_id = std::move(id);
    r.strategy = s;
    r.predicted_root_cause = std::move(cause);
    r.predicted_dependency = false;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// synth

TEST_CASE("synth is deterministic in the seed") {
    CHECK(small_synth(5) == small_synth(5));
    CHECK_FALSE(small_synth(5) == small_synth(6));
    testing::TempDir a("synth_a"), b("synth_b");
    synth::SynthSpec spec;
    spec.n_services = 12;
    spec.n_incidents = 30;
    spec.n_monitors = 26;
    synth::generate(spec, a.path());
    synth::generate(spec, b.path());
    for (const char* f : {"services.jsonl", "incidents.jsonl", "dependencies.jsonl", "monitors.jsonl"})
        CHECK(testing::read_text(a.path() / f) == testing::read_text(b.path() / f));
}

TEST_CASE("synth label quotas") {
    CHECK(synth::slo_labeled_count(260) == 180);
    for (std::size_t n : {13u, 26u, 52u, 100u, 260u}) {
        synth::SynthSpec spec;
        spec.n_services = 10;
        spec.n_incidents = 10;
        spec.n_monitors = n;
        const auto corpus = synth::generate_corpus(spec);
        for (auto task : {Task::Resource, Task::Slo}) {
            CAPTURE(n);
            const auto want = synth::quota(spec, task);
            std::map<std::string, std::size_t> got;
            for (const auto* m : corpus.labeled_monitors(task)) ++got[*m->label(task)];
            const auto classes = corpus.ontology().classes(task);
            std::size_t total = 0;
            for (std::size_t i = 0; i < classes.size(); ++i) {
                CHECK(got[classes[i]] == want[i]);
                total += want[i];
            }
            CHECK(total == (task == Task::Resource ? n : synth::slo_labeled_count(n)));
        }
    }
}

TEST_CASE("synth faulty, exposed and clean services") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        synth::SynthSpec spec;
        spec.seed = seed;
        spec.n_services = 10 + seed * 3;
        spec.n_incidents = 80;
        spec.n_monitors = 13;
        spec.dependency_failure_fraction = 0.25 * static_cast<double>(seed % 5);
        const auto c = synth::generate_corpus(spec);
        CAPTURE(seed);
        std::size_t faulty = 0;
        for (const auto& s : c.services()) {
            faulty += is_faulty(s);
            CHECK(faulty_upstreams(c, s.id) <= 1);
            if (is_faulty(s)) CHECK(faulty_upstreams(c, s.id) == 0);
        }
        CHECK(faulty >= 1);
        std::size_t df = 0;
        for (const auto& inc : c.incidents()) {
            REQUIRE(inc.is_dependency_failure);
            REQUIRE(inc.ground_truth_root_cause);
            if (*inc.is_dependency_failure) {
                ++df;
                REQUIRE(faulty_upstreams(c, inc.owning_service_id) == 1);
                for (const auto* up : c.upstream_services(inc.owning_service_id))
                    if (is_faulty(*up)) CHECK(inc.ground_truth_root_cause->find(up->name) != std::string::npos);
            } else {
                CHECK(faulty_upstreams(c, inc.owning_service_id) == 0);
            }
        }
        CHECK(df == static_cast<std::size_t>(std::llround(spec.dependency_failure_fraction * 80)));
    }
}

TEST_CASE("synth spec validation") {
    synth::SynthSpec spec;
    CHECK_NOTHROW(spec.validate());
    auto bad = spec;
    bad.n_services = 1;
    CHECK_THROWS_AS(bad.validate(), SpecError);
    bad = spec;
    bad.dependency_failure_fraction = 1.5;
    CHECK_THROWS_AS(bad.validate(), SpecError);
    bad = spec;
    bad.edge_density = 0.0;
    CHECK_THROWS_AS(bad.validate(), SpecError);
    bad = spec;
    bad.n_incidents = 0;
    CHECK_THROWS_AS(synth::generate_corpus(bad), SpecError);
}

// ---------------------------------------------------------------------------
// pipeline

TEST_CASE("prepare_rca retrieval excludes the query and unlabeled incidents") {
    auto parts = small_synth().parts();
    // Strip root causes from a third of the incidents.
    std::set<std::string> unlabeled;
    for (std::size_t i = 0; i < parts.incidents.size(); i += 3) {
        parts.incidents[i].ground_truth_root_cause.reset();
        unlabeled.insert(parts.incidents[i].id);
    }
    const auto corpus = Corpus::build(std::move(parts));
    const auto embedder = retrieval::corpus_embedder(corpus);
    const auto index = retrieval::build_index(corpus, embedder).index;
    const pipeline::RcaContext ctx{corpus, &index, &embedder, {}};
    for (const auto& inc : corpus.incidents()) {
        const auto p = pipeline::prepare_rca(ctx, inc.id, RcaStrategy::InC_DEP);
        CAPTURE(inc.id);
        CHECK(p.examples_used.size() == 5);
        std::set<std::string> seen;
        for (const auto& id : p.examples_used) {
            CHECK(id != inc.id);
            CHECK_FALSE(unlabeled.count(id));
            CHECK(seen.insert(id).second);
        }
        CHECK(p.prompt.sections.front() == prompt::Section::TaskDescription);
    }
}

TEST_CASE("prepare_rca errors and non-example strategies") {
    Fixture f;
    CHECK_THROWS_AS(pipeline::prepare_rca(f.ctx(), "inc-nope", RcaStrategy::DEP), ReferenceError);
    const pipeline::RcaContext no_index{f.corpus, nullptr, nullptr, {}};
    CHECK_THROWS_AS(pipeline::prepare_rca(no_index, f.ids(1)[0], RcaStrategy::InC_NoDEP), PreconditionError);
    const auto p = pipeline::prepare_rca(no_index, f.ids(1)[0], RcaStrategy::DEP);
    CHECK(p.examples_used.empty());
    CHECK(p.prompt.text.find("Historical Incident Summary") == std::string::npos);
}

TEST_CASE("apply_rca_response") {
    RcaRunRecord r;
    pipeline::apply_rca_response(r, R"({"Objective1": "cause", "Objective2": "Yes"})");
    CHECK(r.predicted_root_cause == "cause");
    CHECK(r.predicted_dependency == true);
    CHECK_FALSE(r.parse_error);
    pipeline::apply_rca_response(r, "no json here");
    CHECK(r.parse_failure());
    CHECK(r.predicted_root_cause.empty());
    CHECK(r.parse_error == std::optional<std::string>("no_json"));
}

TEST_CASE("rca batch with the stub finds planted dependency failures") {
    Fixture f;
    llm::RuleStubProvider stub;
    const llm::Gateway gw(stub, 3);
    const auto ids = f.ids(40);
    const auto records = pipeline::run_rca_batch(f.ctx(), gw, RcaStrategy::InC_DEP, ids);
    REQUIRE(records.size() == ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& r = records[i];
        CHECK(r.incident_id == ids[i]);
        CHECK(r.ok());
        CHECK(r.examples_used.size() == 5);
        CHECK(r.prompt_hash.size() == 16);
        REQUIRE(r.predicted_dependency);
        CHECK(*r.predicted_dependency == *f.corpus.incident(ids[i]).is_dependency_failure);
    }
    const auto nodep = pipeline::run_rca_batch(f.ctx(), gw, RcaStrategy::NoDEP, ids);
    for (const auto& r : nodep) CHECK(r.predicted_dependency == false);
}

TEST_CASE("rca batch records failures and fails when all fail") {
    Fixture f;
    const auto ids = f.ids(9);
    CountingProvider every_third(3);
    const auto records = pipeline::run_rca_batch(f.ctx(), llm::Gateway(every_third, 1), RcaStrategy::DEP, ids);
    std::size_t errors = 0;
    for (const auto& r : records) {
        if (!r.ok()) {
            ++errors;
            CHECK(r.error->find("injected failure") != std::string::npos);
            CHECK(r.parse_failure());
        }
    }
    CHECK(errors == 3);
    CountingProvider always(1);
    CHECK_THROWS_AS(pipeline::run_rca_batch(f.ctx(), llm::Gateway(always, 2), RcaStrategy::DEP, ids), BatchError);
    const std::vector<std::string> bad{"inc-missing"};
    CHECK_THROWS_AS(pipeline::run_rca_batch(f.ctx(), llm::Gateway(always, 2), RcaStrategy::DEP, bad), ReferenceError);
    CHECK(pipeline::run_rca_batch(f.ctx(), llm::Gateway(always, 2), RcaStrategy::DEP, {}).empty());
}

TEST_CASE("merge_rca_runs") {
    const std::vector<RcaRunRecord> existing{rec("b", RcaStrategy::DEP), rec("a", RcaStrategy::NoDEP, "old-a"),
                                             rec("c", RcaStrategy::NoDEP, "old-c"),
                                             rec("a", RcaStrategy::InC_DEP)};
    const std::vector<RcaRunRecord> fresh{rec("a", RcaStrategy::NoDEP, "new-a"), rec("b", RcaStrategy::NoDEP)};
    const std::vector<std::string> ids{"c", "b", "a"};
    const auto merged = pipeline::merge_rca_runs(existing, fresh, RcaStrategy::NoDEP, ids);
    REQUIRE(merged.size() == 5);
    CHECK(merged[0].incident_id == "c");
    CHECK(merged[0].predicted_root_cause == "old-c");
    CHECK(merged[1].incident_id == "b");
    CHECK(merged[1].strategy == RcaStrategy::NoDEP);
    CHECK(merged[2].predicted_root_cause == "new-a");
    CHECK(merged[3].strategy == RcaStrategy::DEP);
    CHECK(merged[4].strategy == RcaStrategy::InC_DEP);
    // Merging the merged result again with nothing new changes nothing.
    CHECK(pipeline::merge_rca_runs(merged, {}, RcaStrategy::NoDEP, ids) == merged);
}

TEST_CASE("monitor batch and merge") {
    Fixture f;
    llm::RuleStubProvider stub;
    const llm::Gateway gw(stub, 2);
    const auto runs = pipeline::run_monitor_batch(f.corpus, gw, Task::Slo, prompt::MonitorCase::C2);
    CHECK(runs.size() == f.corpus.labeled_monitors(Task::Slo).size());
    for (std::size_t i = 1; i < runs.size(); ++i) CHECK(runs[i - 1].monitor_id < runs[i].monitor_id);
    for (const auto& r : runs) {
        CHECK(r.task == Task::Slo);
        CHECK(r.monitor_case == prompt::MonitorCase::C2);
        CHECK(r.ok());
    }

    const std::vector<std::string> only{runs[1].monitor_id, runs[0].monitor_id};
    const auto some = pipeline::run_monitor_batch(f.corpus, gw, Task::Slo, prompt::MonitorCase::C1, {}, &only);
    REQUIRE(some.size() == 2);
    CHECK(some[0].monitor_id == runs[0].monitor_id);

    const auto merged = pipeline::merge_monitor_runs(runs, some, Task::Slo, prompt::MonitorCase::C1);
    CHECK(merged.size() == runs.size() + 2);
    CHECK(merged.front().monitor_case == prompt::MonitorCase::C1);
    CHECK_THROWS_AS(pipeline::merge_monitor_runs({}, runs, Task::Resource, prompt::MonitorCase::C2),
                    PreconditionError);

    auto parts = f.corpus.parts();
    for (auto& m : parts.monitors) m.slo_label.reset();
    const auto unlabeled = Corpus::build(std::move(parts));
    CHECK_THROWS_AS(pipeline::run_monitor_batch(unlabeled, gw, Task::Slo, prompt::MonitorCase::C1), PreconditionError);
}

TEST_CASE("summarize_corpus reuses cached summaries") {
    const auto corpus = small_synth(9, 12);
    CountingProvider provider;
    pipeline::SummaryCache cache;
    pipeline::SummarizeStats first;
    const auto out = pipeline::summarize_corpus(corpus, provider, cache, {}, {}, &first);
    const std::size_t fields = corpus.services().size() + 2 * corpus.incidents().size();
    // Identical raw text (e.g. two incidents sharing a root cause) is a cache hit.
    CHECK(first.generated + first.cached == fields);
    CHECK(first.generated > fields / 2);
    CHECK(provider.calls == first.generated);
    for (const auto& inc : out.incidents()) {
        REQUIRE(inc.clean_summary);
        CHECK(inc.clean_summary->find('<') == std::string::npos);
        CHECK(inc.clean_root_cause);
    }
    for (const auto& s : out.services()) CHECK(s.summarized_description);

    testing::TempDir dir("cache");
    cache.save(dir.path() / pipeline::SummaryCache::kFile);
    auto reloaded = pipeline::SummaryCache::load(dir.path() / pipeline::SummaryCache::kFile);
    CHECK(reloaded.size() == cache.size());

    pipeline::SummarizeStats second;
    const auto again = pipeline::summarize_corpus(corpus, provider, reloaded, {}, {}, &second);
    CHECK(second.generated == 0);
    CHECK(second.cached == fields);
    CHECK(again == out);

    auto parts = corpus.parts();
    parts.incidents[0].raw_summary += " More detail.";
    pipeline::SummarizeStats third;
    pipeline::summarize_corpus(Corpus::build(std::move(parts)), provider, reloaded, {}, {}, &third);
    CHECK(third.generated == 1);

    CHECK(pipeline::SummaryCache::load(dir.path() / "absent.jsonl").size() == 0);
    testing::write_text(dir.path() / "bad.jsonl", "{\"key\": \"a\", \"summary\": \"b\"}\nnot json\n");
    CHECK_THROWS_AS(pipeline::SummaryCache::load(dir.path() / "bad.jsonl"), SchemaError);
}

// ---------------------------------------------------------------------------
// records

TEST_CASE("run records round-trip through JSON and files") {
    RcaRunRecord r = rec("inc-1", RcaStrategy::InC_DEP, "Cache \"eviction\"\nstorm");
    r.prompt_hash = "00ff00ff00ff00ff";
    r.predicted_dependency = true;
    r.examples_used = {"inc-2", "inc-3"};
    r.elapsed_ms = 17;
    r.provider = llm::ProviderKind::replay_fixture;
    RcaRunRecord failed = rec("inc-2", RcaStrategy::NoDEP, "");
    failed.predicted_dependency.reset();
    failed.parse_error = "bad_label";
    RcaRunRecord errored = rec("inc-3", RcaStrategy::DEP, "");
    errored.predicted_dependency.reset();
    errored.error = "HTTP 500";
    for (const auto& x : {r, failed, errored}) CHECK(rca_record_from_json(to_json(x)) == x);

    MonitorRunRecord m;
    m.monitor_id = "mon-1";
    m.task = Task::Slo;
    m.monitor_case = prompt::MonitorCase::C4;
    m.prompt_hash = "0123456789abcdef";
    m.predicted = {"Freshness", "age of data"};
    MonitorRunRecord pf = m;
    pf.predicted = {std::nullopt, "unclear"};
    for (const auto& x : {m, pf}) CHECK(monitor_record_from_json(to_json(x)) == x);

    testing::TempDir dir("records");
    const std::vector<RcaRunRecord> rs{r, failed, errored};
    write_rca_runs(dir.path() / kRcaRunsFile, rs);
    CHECK(read_rca_runs(dir.path() / kRcaRunsFile) == rs);
    write_monitor_runs(dir.path() / kMonitorRunsFile, {m, pf});
    CHECK(read_monitor_runs(dir.path() / kMonitorRunsFile) == std::vector<MonitorRunRecord>{m, pf});
    CHECK(read_rca_runs(dir.path() / "missing.jsonl").empty());

    testing::write_text(dir.path() / "bad.jsonl", to_json(r).dump() + "\n{\"incident_id\": 3}\n");
    try {
        read_rca_runs(dir.path() / "bad.jsonl");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

// ---------------------------------------------------------------------------
// report

TEST_CASE("perfect predictions score 100 on every text metric") {
    Fixture f;
    std::vector<RcaRunRecord> records;
    for (const auto& inc : f.corpus.incidents()) {
        auto r = rec(inc.id, RcaStrategy::DEP, sanitize::clean_text(*inc.ground_truth_root_cause).text);
        r.predicted_dependency = *inc.is_dependency_failure;
        records.push_back(r);
    }
    const auto res = report::evaluate_rca(records, f.corpus, f.embedder);
    CHECK(res.scored == records.size());
    REQUIRE(res.rows.size() == 4);
    for (const auto& row : res.rows) {
        CAPTURE(row.metric);
        if (row.metric == "METEOR") {
            // One chunk still costs 0.5 / m^3 of the score.
            CHECK(row.mean < 100.0);
            CHECK(row.mean > 99.0);
            continue;
        }
        CHECK(row.mean == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(row.std == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK(res.dependency.f1 == doctest::Approx(1.0));
}

TEST_CASE("errored records are left out of text metrics") {
    Fixture f;
    const auto& inc = f.corpus.incidents()[0];
    auto good = rec(inc.id, RcaStrategy::NoDEP, sanitize::clean_text(*inc.ground_truth_root_cause).text);
    auto bad = rec(f.corpus.incidents()[1].id, RcaStrategy::NoDEP, "");
    bad.predicted_dependency.reset();
    bad.error = "timeout";
    const std::vector<RcaRunRecord> records{good, bad};
    const auto res = report::evaluate_rca(records, f.corpus, f.embedder);
    CHECK(res.records == 2);
    CHECK(res.scored == 1);
    CHECK(res.errors == 1);

    const std::vector<RcaRunRecord> unknown{rec("inc-zzz", RcaStrategy::NoDEP)};
    CHECK_THROWS_AS(report::evaluate_rca(unknown, f.corpus, f.embedder), EvalError);
}

TEST_CASE("report tables carry the expected labels") {
    Fixture f;
    llm::RuleStubProvider stub;
    const llm::Gateway gw(stub, 2);
    const auto ids = f.ids(20);
    std::vector<RcaRunRecord> rca;
    for (auto s : prompt::kAllStrategies)
        for (auto& r : pipeline::run_rca_batch(f.ctx(), gw, s, ids)) rca.push_back(std::move(r));
    std::vector<MonitorRunRecord> mon;
    for (auto task : {Task::Resource, Task::Slo})
        for (auto c : prompt::kAllCases)
            for (auto& r : pipeline::run_monitor_batch(f.corpus, gw, task, c)) mon.push_back(std::move(r));

    const auto rep = report::build_report(rca, mon, f.corpus, f.embedder);
    REQUIRE(rep.rca.size() == 4);
    REQUIRE(rep.monitor.size() == 2);
    CHECK(rep.monitor[0].task == Task::Slo);
    const auto text = report::render_text(rep, f.corpus.ontology());

    const auto header_end = text.find('\n', text.find("Metric"));
    const auto header = text.substr(text.find("Metric"), header_end - text.find("Metric"));
    std::size_t pos = 0;
    for (const char* col : report::kRcaColumns) {
        const auto at = header.find(col, pos);
        CAPTURE(col);
        REQUIRE(at != std::string::npos);
        pos = at + 1;
    }
    pos = 0;
    for (const char* label : report::kMetricLabels) {
        const auto at = text.find(std::string("\n") + label, pos);
        CAPTURE(label);
        REQUIRE(at != std::string::npos);
        pos = at + 1;
    }
    CHECK(text.find(report::kFtGptNote) != std::string::npos);
    CHECK(text.find("excluded") != std::string::npos);

    CHECK(text.find("SLO class prediction") < text.find("Resource class prediction"));
    for (const char* g : {"precision", "recall", "f1-score", "accuracy", "macro avg", "micro avg", "weighted avg"})
        CHECK(text.find(g) != std::string::npos);
    for (auto task : {Task::Slo, Task::Resource})
        for (const auto& label : f.corpus.ontology().classes(task))
            CHECK(text.find("\n" + label + " ") != std::string::npos);
    CHECK(text.find("C1    C2    C3    C4") != std::string::npos);

    const auto split = text.find("by incident type");
    REQUIRE(split != std::string::npos);
    CHECK(text.find("NoSD           SD", split) != std::string::npos);
    for (const auto& r : rep.rca) {
        CHECK_FALSE(r.rows_sd.empty());
        CHECK_FALSE(r.rows_nosd.empty());
    }

    const auto j = report::to_json(rep);
    CHECK(j["rca"]["strategies"]["DEP"]["metrics_by_type"]["SD"].contains("BLEU"));
    CHECK(j["rca"]["columns"].size() == 5);
    CHECK(j["rca"]["strategies"].contains("InC_DEP"));
    CHECK(j["monitor"]["slo"].contains("C4"));
    CHECK(j["monitor"]["resource"]["C1"]["per_class"].size() == 13);
}
