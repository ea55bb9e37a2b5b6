#include "prompt_fixtures.hpp"
#include "support.hpp"

#include "xlc/error.hpp"
#include "xlc/hash.hpp"
#include "xlc/prompt.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <set>

using namespace xlc;
using namespace xlc::prompt;

namespace {

using Sections = std::vector<Section>;

RenderedPrompt rca(RcaStrategy s, bool with_upstream = true) {
    const auto in = testing::prompt_inputs();
    const std::span<const UpstreamInfo> up =
        with_upstream ? std::span<const UpstreamInfo>(in.upstream) : std::span<const UpstreamInfo>{};
    const std::span<const Example> ex =
        uses_examples(s) ? std::span<const Example>(in.examples) : std::span<const Example>{};
    return build_rca_prompt(s, in.incident, in.service, up, ex, kMaxExamples, with_upstream);
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

/// Text of one section: the blocks are separated by blank lines, so locate
/// it by its heading and the start of the following section.
std::string section_text(const RenderedPrompt& p, std::string_view heading, std::string_view next_heading) {
    const auto start = p.text.find(heading);
    REQUIRE(start != std::string::npos);
    const auto end = next_heading.empty() ? p.text.size() - 1 : p.text.find(next_heading, start);
    REQUIRE(end != std::string::npos);
    return p.text.substr(start, end - start);
}

}  // namespace

TEST_CASE("rca prompt goldens match the checked-in files") {
    const auto mismatched = testing::check_goldens(testing::rca_goldens(), testing::fixture_dir() / "prompts");
    for (const auto& name : mismatched) MESSAGE("golden differs: " << name);
    CHECK(mismatched.empty());
}

TEST_CASE("monitor prompt goldens match the checked-in files") {
    const auto mismatched = testing::check_goldens(testing::monitor_goldens(), testing::fixture_dir() / "prompts");
    for (const auto& name : mismatched) MESSAGE("golden differs: " << name);
    CHECK(mismatched.empty());
}

TEST_CASE("rca section order per strategy") {
    using S = Section;
    CHECK(rca(RcaStrategy::NoDEP).sections == Sections{S::TaskDescription, S::AnsweringFormat, S::IncidentDetails});
    CHECK(rca(RcaStrategy::DEP).sections ==
          Sections{S::TaskDescription, S::AnsweringFormat, S::IncidentDetails, S::UpstreamDependencies});
    CHECK(rca(RcaStrategy::InC_NoDEP).sections ==
          Sections{S::TaskDescription, S::HistoricalExamples, S::AnsweringFormat, S::IncidentDetails});
    CHECK(rca(RcaStrategy::InC_DEP).sections == Sections{S::TaskDescription, S::HistoricalExamples,
                                                         S::AnsweringFormat, S::IncidentDetails,
                                                         S::UpstreamDependencies});
}

TEST_CASE("in-context prompts carry five numbered examples") {
    for (auto s : {RcaStrategy::InC_NoDEP, RcaStrategy::InC_DEP}) {
        const auto p = rca(s);
        CHECK(count(p.text, "- Historical Incident Summary ") == 5);
        CHECK(count(p.text, "- Historical Incident Title ") == 5);
        CHECK(count(p.text, "- Historical Incident Root Cause ") == 5);
        CHECK(p.text.find("- Historical Incident Summary 5: ") != std::string::npos);
        CHECK(p.warnings.empty());
    }
    CHECK(count(rca(RcaStrategy::DEP).text, "Historical Incident") == 0);
}

TEST_CASE("upstream list and empty upstream") {
    const auto with = rca(RcaStrategy::DEP);
    CHECK(with.text.find("1. PartitionStore") != std::string::npos);
    CHECK(with.text.find("3. QuotaBroker") != std::string::npos);
    const auto without = rca(RcaStrategy::DEP, false);
    CHECK(without.text.find("No known upstream dependencies.") != std::string::npos);
    CHECK(rca(RcaStrategy::NoDEP).text.find("PartitionStore") == std::string::npos);
}

TEST_CASE("rca prompts have no trailing whitespace and end in one newline") {
    for (const auto& g : testing::rca_goldens()) {
        CAPTURE(g.name);
        const auto& s = g.prompt.text;
        REQUIRE(!s.empty());
        CHECK(s.back() == '\n');
        CHECK(s.find("\n\n\n") == std::string::npos);
        CHECK(s.find(" \n") == std::string::npos);
        CHECK(s.substr(s.size() - 2) != "\n\n");
        CHECK(g.prompt.hash == prompt_hash(s));
    }
}

TEST_CASE("richer strategies contain the blocks of the simpler ones") {
    const auto dep = rca(RcaStrategy::DEP);
    const auto inc_nodep = rca(RcaStrategy::InC_NoDEP);
    const auto inc_dep = rca(RcaStrategy::InC_DEP);
    const auto nodep = rca(RcaStrategy::NoDEP);

    const auto upstream_block = section_text(dep, "-- Upstream Service Dependencies:", "");
    CHECK(inc_dep.text.find(upstream_block) != std::string::npos);

    const auto examples_start = inc_nodep.text.find("- Historical Incident Summary 1");
    const auto examples_end = inc_nodep.text.find("- Historical Incident Root Cause 5");
    REQUIRE(examples_start != std::string::npos);
    REQUIRE(examples_end != std::string::npos);
    CHECK(inc_dep.text.find(inc_nodep.text.substr(examples_start, examples_end - examples_start)) !=
          std::string::npos);

    const auto details_start = nodep.text.find("- Service: ");
    REQUIRE(details_start != std::string::npos);
    const auto details = nodep.text.substr(details_start);
    CHECK(dep.text.find(details) != std::string::npos);
    CHECK(inc_nodep.text.find(details) != std::string::npos);
}

TEST_CASE("interpolated fields cannot add lines") {
    auto in = testing::prompt_inputs();
    in.incident.title = "Title\n\n## Injected heading\n";
    in.upstream[0].description = "line one\nline two";
    const auto p = build_rca_prompt(RcaStrategy::DEP, in.incident, in.service, in.upstream, {}, 0, true);
    CHECK(p.text.find("- Incident Title: Title ## Injected heading") != std::string::npos);
    CHECK(p.text.find("\n## Injected") == std::string::npos);
    CHECK(p.text.find("line one line two") != std::string::npos);
}

TEST_CASE("rca preconditions") {
    auto in = testing::prompt_inputs();
    SUBCASE("in-context strategy without examples") {
        CHECK_THROWS_AS(build_rca_prompt(RcaStrategy::InC_DEP, in.incident, in.service, in.upstream, {}, 10, true),
                        MissingExamples);
        CHECK_THROWS_AS(build_rca_prompt(RcaStrategy::InC_NoDEP, in.incident, in.service, {}, {}), MissingExamples);
    }
    SUBCASE("empty pool is allowed with a warning") {
        const auto p = build_rca_prompt(RcaStrategy::InC_NoDEP, in.incident, in.service, {}, {}, 0);
        CHECK(p.warnings.size() == 1);
        CHECK(count(p.text, "Historical Incident Summary") == 0);
    }
    SUBCASE("fewer than five examples warn") {
        const std::span<const Example> two(in.examples.data(), 2);
        const auto p = build_rca_prompt(RcaStrategy::InC_NoDEP, in.incident, in.service, {}, two);
        REQUIRE(p.warnings.size() == 1);
        CHECK(p.warnings[0].find("only 2") != std::string::npos);
        CHECK(count(p.text, "- Historical Incident Summary ") == 2);
    }
    SUBCASE("more than five examples") {
        in.examples.push_back(in.examples.front());
        CHECK_THROWS_AS(build_rca_prompt(RcaStrategy::InC_NoDEP, in.incident, in.service, {}, in.examples),
                        PreconditionError);
    }
    SUBCASE("dependency strategy missing known upstream") {
        CHECK_THROWS_AS(build_rca_prompt(RcaStrategy::DEP, in.incident, in.service, {}, {}, 0, true),
                        PreconditionError);
        CHECK_NOTHROW(build_rca_prompt(RcaStrategy::NoDEP, in.incident, in.service, {}, {}, 0, true));
    }
}

TEST_CASE("rendering is byte-stable") {
    const auto a = testing::rca_goldens();
    const auto b = testing::rca_goldens();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].prompt.text == b[i].prompt.text);
        CHECK(a[i].prompt.hash == b[i].prompt.hash);
    }
    std::set<std::uint64_t> hashes;
    for (const auto& g : a) hashes.insert(g.prompt.hash);
    CHECK(hashes.size() == 6);  // NoDEP and InC_NoDEP ignore the upstream flag
}

TEST_CASE("strategy and case names") {
    for (auto s : kAllStrategies) {
        CHECK(parse_strategy(to_string(s)) == s);
        CHECK(parse_strategy(cli_name(s)) == s);
    }
    CHECK(parse_strategy("INC-DEP") == RcaStrategy::InC_DEP);
    CHECK_FALSE(parse_strategy("dep2"));
    for (auto c : kAllCases) CHECK(parse_case(to_string(c)) == c);
    CHECK_FALSE(parse_case("C5"));
}

TEST_CASE("monitor prompt sections per case") {
    const auto in = testing::prompt_inputs();
    using S = Section;
    const Sections base{S::TaskDescription, S::AdditionalGuidance, S::MonitorMetadata};
    auto with = [&](std::initializer_list<S> extra) {
        Sections s = base;
        s.insert(s.end(), extra);
        return s;
    };
    for (auto task : {Task::Resource, Task::Slo}) {
        CHECK(build_monitor_prompt(task, MonitorCase::C1, in.monitor, in.service).sections == base);
        CHECK(build_monitor_prompt(task, MonitorCase::C2, in.monitor, in.service).sections ==
              with({S::ServiceDescription}));
        CHECK(build_monitor_prompt(task, MonitorCase::C3, in.monitor, in.service).sections ==
              with({S::ServiceDescription, S::ComponentDescriptions}));
        CHECK(build_monitor_prompt(task, MonitorCase::C4, in.monitor, in.service).sections ==
              with({S::ComponentDescriptions}));
    }
}

TEST_CASE("C4 is C3 without the service block; C1 has no description") {
    const auto in = testing::prompt_inputs();
    for (auto task : {Task::Resource, Task::Slo}) {
        const auto c1 = build_monitor_prompt(task, MonitorCase::C1, in.monitor, in.service);
        const auto c2 = build_monitor_prompt(task, MonitorCase::C2, in.monitor, in.service);
        const auto c3 = build_monitor_prompt(task, MonitorCase::C3, in.monitor, in.service);
        const auto c4 = build_monitor_prompt(task, MonitorCase::C4, in.monitor, in.service);

        const std::string service_line = "- LedgerService: LedgerService records billing transactions";
        CHECK(c1.text.find(service_line) == std::string::npos);
        CHECK(c1.text.find("LedgerWriter") == std::string::npos);
        CHECK(c2.text.find(service_line) != std::string::npos);
        CHECK(c2.text.find("LedgerWriter") == std::string::npos);
        CHECK(c4.text.find(service_line) == std::string::npos);
        CHECK(c4.text.find("- Component 1 - LedgerWriter: ") != std::string::npos);

        // Remove the service block (heading up to the blank line) from C3.
        const auto s_start = c3.text.find(service_line);
        REQUIRE(s_start != std::string::npos);
        const auto block_start = c3.text.rfind("\n\n", s_start);
        const auto block_end = c3.text.find("\n\n", s_start);
        REQUIRE(block_start != std::string::npos);
        REQUIRE(block_end != std::string::npos);
        auto stripped = c3.text;
        stripped.erase(block_start, block_end - block_start);
        CHECK(stripped == c4.text);

        // C2 is C1 plus the service block.
        CHECK(c2.text.substr(0, c1.text.size() - 1) == c1.text.substr(0, c1.text.size() - 1));
    }
}

TEST_CASE("monitor prompt lists the whole menu in order") {
    const auto in = testing::prompt_inputs();
    const Ontology ont;
    for (auto task : {Task::Resource, Task::Slo}) {
        const auto p = build_monitor_prompt(task, MonitorCase::C1, in.monitor, in.service);
        std::size_t last = 0;
        const auto classes = ont.classes(task);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            const auto entry = std::to_string(i + 1) + ". " + classes[i];
            const auto pos = p.text.find(entry);
            CAPTURE(entry);
            REQUIRE(pos != std::string::npos);
            CHECK(pos > last);
            last = pos;
        }
        CHECK(p.text.find("- Metric Name: ledger_dataFreshnessInSeconds") != std::string::npos);
    }
}

TEST_CASE("monitor prompt without descriptions") {
    auto in = testing::prompt_inputs();
    in.service.description.clear();
    in.service.components.clear();
    const auto p = build_monitor_prompt(Task::Slo, MonitorCase::C3, in.monitor, in.service);
    CHECK(p.sections.size() == 5);
    CHECK(p.text.find("- LedgerService:") == std::string::npos);
}

// ---------------------------------------------------------------------------
// Response parsing

TEST_CASE("rca response fixtures") {
    const auto dir = testing::fixture_dir() / "responses";
    const auto manifest = nlohmann::json::parse(testing::read_text(dir / "manifest.json"));
    std::size_t good = 0, bad = 0;
    for (const auto& entry : manifest.at("rca")) {
        const auto file = entry.at("file").get<std::string>();
        CAPTURE(file);
        const auto text = testing::read_text(dir / file);
        if (entry.contains("error")) {
            ++bad;
            try {
                parse_rca_response(text);
                FAIL("expected a parse error");
            } catch (const ParseError& e) {
                CHECK(std::string(to_string(e.kind())) == entry.at("error").get<std::string>());
            }
        } else {
            ++good;
            const auto answer = parse_rca_response(text);
            CHECK(answer.root_cause == entry.at("root_cause").get<std::string>());
            CHECK(answer.is_dependency_failure == entry.at("dependency").get<bool>());
        }
    }
    CHECK(good >= 20);
    CHECK(bad >= 5);
}

TEST_CASE("rca response details") {
    CHECK(parse_rca_response(R"({"Objective1": "  padded  ", "Objective2": "'no'"})") == RcaAnswer{"padded", false});
    CHECK_THROWS_AS(parse_rca_response(R"({"Objective1": 3, "Objective2": "Yes"})"), ParseError);
    CHECK_THROWS_AS(parse_rca_response(R"({"Objective1": "x", "Objective2": true})"), ParseError);
    CHECK_THROWS_AS(parse_rca_response(""), ParseError);
    try {
        parse_rca_response(R"({"Objective2": "Yes"})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseErrorKind::missing_field);
        CHECK(std::string(e.what()).find("Objective1") != std::string::npos);
    }
}

TEST_CASE("render_rca_answer round-trips") {
    testing::Gen g(11);
    const std::string alphabet = "abc XYZ{}\"\\\n\t:,";
    for (int i = 0; i < 500; ++i) {
        RcaAnswer a;
        const auto len = 1 + g.below(30);
        for (std::size_t j = 0; j < len; ++j) a.root_cause += alphabet[g.below(alphabet.size())];
        a.root_cause = "r" + a.root_cause + "z";
        a.is_dependency_failure = g.coin();
        CAPTURE(a.root_cause);
        CHECK(parse_rca_response(render_rca_answer(a)) == a);
        CHECK(parse_rca_response("Result:\n```json\n" + render_rca_answer(a) + "\n```\n") == a);
    }
}

TEST_CASE("monitor response fixtures") {
    const auto dir = testing::fixture_dir() / "responses";
    const auto manifest = nlohmann::json::parse(testing::read_text(dir / "manifest.json"));
    REQUIRE(manifest.at("monitor").size() >= 2);
    for (const auto& entry : manifest.at("monitor")) {
        const auto file = entry.at("file").get<std::string>();
        CAPTURE(file);
        const auto task = entry.at("task").get<std::string>() == "slo" ? Task::Slo : Task::Resource;
        const auto answer = parse_monitor_response(testing::read_text(dir / file), task);
        REQUIRE(answer.predicted);
        CHECK(*answer.predicted == entry.at("label").get<std::string>());
        CHECK(!answer.rationale.empty());
    }
}

TEST_CASE("monitor response parsing") {
    SUBCASE("last label in the Q2 answer wins") {
        const auto a = parse_monitor_response(
            "Q1: mentions Latency a lot.\nQ2: Not Latency; this is best described as Availability.", Task::Slo);
        CHECK(a.predicted == std::optional<std::string>("Availability"));
        CHECK(a.rationale == "mentions Latency a lot.");
    }
    SUBCASE("normalized matching") {
        CHECK(parse_monitor_response("Q2: success_rate", Task::Slo).predicted ==
              std::optional<std::string>("Success Rate"));
        CHECK(parse_monitor_response("Q2: RAM memory", Task::Resource).predicted ==
              std::optional<std::string>("Ram-memory"));
        CHECK(parse_monitor_response("Q2: Certificates", Task::Resource).predicted ==
              std::optional<std::string>("Certificate"));
    }
    SUBCASE("no marker uses the whole text") {
        CHECK(parse_monitor_response("I would say Throughput.", Task::Slo).predicted ==
              std::optional<std::string>("Throughput"));
    }
    SUBCASE("no label is a parse failure") {
        const auto a = parse_monitor_response("Q1: hard to say.\nQ2: the entity is unclear", Task::Resource);
        CHECK(a.parse_failure());
        CHECK(parse_monitor_response("", Task::Slo).parse_failure());
    }
    SUBCASE("labels inside other words do not match") {
        CHECK(parse_monitor_response("Q2: ultralatencyx", Task::Slo).parse_failure());
    }
}
