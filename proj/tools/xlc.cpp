#include "cli_config.hpp"

#include "xlc/corpus.hpp"
#include "xlc/error.hpp"
#include "xlc/llm.hpp"
#include "xlc/pipeline.hpp"
#include "xlc/records.hpp"
#include "xlc/report.hpp"
#include "xlc/retrieval.hpp"
#include "xlc/sanitize.hpp"
#include "xlc/synth.hpp"
#include "xlc/text.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace xlc;
using cli::Config;
using cli::UsageError;

namespace {

struct Globals {
    std::map<std::string, std::string> flags;  // config key -> flag value
    std::string config_file;
    bool verbose = false;
};

std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw MissingFile(p.string());
    return read_all(in);
}

void write_file(const fs::path& p, std::string_view content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, p);
}

Config resolve(const Globals& g) {
    Config cfg;
    fs::path file = g.config_file.empty() ? fs::path("xlc.toml") : fs::path(g.config_file);
    if (!g.config_file.empty() || fs::exists(file)) cfg.apply_file(file);
    cfg.apply_environment([](const char* name) { return std::getenv(name); });
    for (const auto& [k, v] : g.flags) cfg.set(k, v);
    if (g.verbose) std::cerr << "effective configuration:\n" << cfg.describe();
    return cfg;
}

sanitize::CleanOptions clean_options(const Config& cfg) {
    sanitize::CleanOptions o;
    o.stack_trace_limit = cfg.get_count("stack_limit", 1);
    return o;
}

std::unique_ptr<llm::Provider> make_provider(const Config& cfg) {
    const auto kind = llm::parse_provider_kind(cfg.get("provider"));
    if (!kind) throw UsageError("unknown provider '" + cfg.get("provider") + "' (expected stub, replay or remote)");
    std::unique_ptr<llm::Provider> p;
    switch (*kind) {
        case llm::ProviderKind::rule_stub: p = std::make_unique<llm::RuleStubProvider>(); break;
        case llm::ProviderKind::replay_fixture:
            if (!fs::is_directory(cfg.get("fixtures")))
                throw MissingFile(cfg.get("fixtures") + " (replay fixture directory)");
            p = std::make_unique<llm::ReplayProvider>(cfg.get("fixtures"));
            break;
        case llm::ProviderKind::remote_http: {
            llm::RemoteConfig rc;
            rc.endpoint = cfg.get("endpoint");
            rc.api_key = cfg.get("api_key");
            if (rc.endpoint.empty()) throw UsageError("remote provider needs an endpoint (XLC_LLM_ENDPOINT or --endpoint)");
            p = std::make_unique<llm::RemoteHttpProvider>(rc);
            break;
        }
    }
    if (!cfg.get("record").empty()) p = std::make_unique<llm::RecordingProvider>(std::move(p), cfg.get("record"));
    return p;
}

std::unique_ptr<Embedder> make_embedder(const Config& cfg, const Corpus& corpus) {
    const auto& kind = cfg.get("embedder");
    if (kind == "hashing") return std::make_unique<HashingEmbedder>(retrieval::corpus_embedder(corpus));
    if (kind == "remote") {
        llm::RemoteConfig rc;
        rc.endpoint = cfg.get("embed_endpoint");
        rc.api_key = cfg.get("api_key");
        if (rc.endpoint.empty()) throw UsageError("remote embedder needs embed_endpoint");
        return std::make_unique<RemoteEmbedder>(rc, cfg.get("embed_model"), cfg.get_count("embed_dim", 1));
    }
    throw UsageError("unknown embedder '" + kind + "' (expected hashing or remote)");
}

fs::path index_dir(const Config& cfg) {
    return cfg.get("index").empty() ? fs::path(cfg.get("out")) / "index" : fs::path(cfg.get("index"));
}

std::vector<std::string> read_ids(const fs::path& file) {
    std::vector<std::string> ids;
    std::istringstream in(read_file(file));
    std::string line;
    while (std::getline(in, line)) {
        auto id = std::string(text::trim(line));
        if (!id.empty() && id.front() != '#') ids.push_back(std::move(id));
    }
    return ids;
}

// ---------------------------------------------------------------------------

int cmd_synth(const Config& cfg, const std::string& spec_file, synth::SynthSpec spec,
              const std::map<std::string, bool>& given, const std::string& dir_flag) {
    if (!spec_file.empty()) {
        const auto kv = cli::parse_key_values(read_file(spec_file), spec_file);
        for (const auto& [k, v] : kv) {
            if (given.count(k) && given.at(k)) continue;
            try {
                if (k == "seed") spec.seed = std::stoull(v);
                else if (k == "n_services") spec.n_services = std::stoul(v);
                else if (k == "n_incidents") spec.n_incidents = std::stoul(v);
                else if (k == "n_monitors") spec.n_monitors = std::stoul(v);
                else if (k == "dependency_failure_fraction") spec.dependency_failure_fraction = std::stod(v);
                else if (k == "edge_density") spec.edge_density = std::stod(v);
                else throw UsageError(spec_file + ": unknown spec key '" + k + "'");
            } catch (const std::logic_error&) {
                throw UsageError(spec_file + ": bad value for " + k + ": '" + v + "'");
            }
        }
    }
    const fs::path dir = dir_flag.empty() ? fs::path(cfg.get("corpus")) : fs::path(dir_flag);
    const auto corpus = synth::generate(spec, dir);
    std::cerr << "wrote synthetic corpus to " << dir.string() << ": " << corpus.services().size() << " services, "
              << corpus.edges().size() << " edges, " << corpus.incidents().size() << " incidents, "
              << corpus.monitors().size() << " monitors\n";
    return 0;
}

int cmd_ingest(const Config& cfg) {
    const auto corpus = load_corpus(cfg.get("corpus"));
    std::size_t df = 0, labeled = 0;
    for (const auto& i : corpus.incidents()) {
        if (i.is_dependency_failure) ++labeled;
        if (i.is_dependency_failure.value_or(false)) ++df;
    }
    std::cout << "services: " << corpus.services().size() << "\n"
              << "dependency edges: " << corpus.edges().size() << "\n"
              << "incidents: " << corpus.incidents().size() << " (" << labeled << " labeled, " << df
              << " dependency failures)\n"
              << "monitors: " << corpus.monitors().size() << " (" << corpus.labeled_monitors(Task::Resource).size()
              << " resource-labeled, " << corpus.labeled_monitors(Task::Slo).size() << " SLO-labeled)\n";
    return 0;
}

int cmd_sanitize(const Config& cfg, const std::string& input, bool verbose) {
    const auto raw = input.empty() || input == "-" ? read_all(std::cin) : read_file(input);
    const auto result = sanitize::clean_text(raw, clean_options(cfg));
    std::cout << result.text << "\n";
    if (verbose) {
        const auto& r = result.report;
        std::cerr << "input chars: " << r.input_chars << ", output chars: " << r.output_chars << "\n";
        for (auto kind : {sanitize::Removed::html_tag, sanitize::Removed::image_tag, sanitize::Removed::table_block,
                          sanitize::Removed::stack_trace_lines})
            std::cerr << "removed " << sanitize::to_string(kind) << ": " << r.count(kind) << "\n";
    }
    return 0;
}

int cmd_summarize(const Config& cfg) {
    const fs::path root = cfg.get("corpus");
    const auto corpus = load_corpus(root);
    auto provider = make_provider(cfg);
    auto cache = pipeline::SummaryCache::load(root / pipeline::SummaryCache::kFile);
    llm::SummarizeOptions opts;
    if (cfg.source("model") != "default") opts.model = cfg.get("model");
    pipeline::SummarizeStats stats;
    const auto updated = pipeline::summarize_corpus(corpus, *provider, cache, opts, clean_options(cfg), &stats);
    save_corpus(updated, root);
    cache.save(root / pipeline::SummaryCache::kFile);
    std::cerr << "summaries: " << stats.generated << " generated, " << stats.cached << " from cache\n";
    return 0;
}

int cmd_index_build(const Config& cfg) {
    const auto corpus = load_corpus(cfg.get("corpus"));
    const auto embedder = make_embedder(cfg, corpus);
    const auto built = retrieval::build_index(corpus, *embedder);
    for (const auto& w : built.warnings) std::cerr << "warning: " << w << "\n";
    const auto dir = index_dir(cfg);
    retrieval::save_index(built.index, dir);
    std::cerr << "indexed " << built.index.size() << " incidents into " << dir.string() << "\n";
    return 0;
}

int cmd_rca_run(const Config& cfg, const std::string& strategy_name, const std::string& ids_file, bool resume) {
    const auto strategy = prompt::parse_strategy(strategy_name);
    if (!strategy) throw UsageError("unknown strategy '" + strategy_name + "'");
    const auto corpus = load_corpus(cfg.get("corpus"));

    std::vector<std::string> ids;
    if (ids_file.empty())
        for (const auto& i : corpus.incidents()) ids.push_back(i.id);
    else
        ids = read_ids(ids_file);
    for (const auto& id : ids)
        if (!corpus.find_incident(id)) throw ReferenceError(id, "listed in " + ids_file);

    std::unique_ptr<Embedder> embedder;
    retrieval::Index index;
    if (prompt::uses_examples(*strategy)) {
        embedder = make_embedder(cfg, corpus);
        const auto dir = index_dir(cfg);
        if (fs::exists(dir / retrieval::kIndexFile)) {
            index = retrieval::load_index(dir);
            if (index.dimension() != embedder->dimension())
                throw Error("index at " + dir.string() + " has dimension " + std::to_string(index.dimension()) +
                            " but the embedder produces " + std::to_string(embedder->dimension()) +
                            "; rebuild it with `xlc index build`");
        } else {
            auto built = retrieval::build_index(corpus, *embedder);
            for (const auto& w : built.warnings) std::cerr << "warning: " << w << "\n";
            index = std::move(built.index);
            std::cerr << "no index at " << dir.string() << "; built one in memory\n";
        }
    }

    const fs::path runs_file = fs::path(cfg.get("out")) / kRcaRunsFile;
    const auto existing = read_rca_runs(runs_file);
    std::vector<std::string> todo = ids;
    if (resume) {
        std::set<std::string> done;
        for (const auto& r : existing)
            if (r.strategy == *strategy && r.ok()) done.insert(r.incident_id);
        std::erase_if(todo, [&](const std::string& id) { return done.count(id) > 0; });
    }

    auto provider = make_provider(cfg);
    pipeline::RcaContext ctx{corpus, embedder ? &index : nullptr, embedder.get(), {}};
    ctx.options.k = cfg.get_count("k", 1);
    ctx.options.model = cfg.get("model");
    ctx.options.clean = clean_options(cfg);
    const llm::Gateway gateway(*provider, cfg.get_count("concurrency", 1));
    std::vector<RcaRunRecord> fresh;
    if (!todo.empty()) fresh = pipeline::run_rca_batch(ctx, gateway, *strategy, todo);

    write_rca_runs(runs_file, pipeline::merge_rca_runs(existing, fresh, *strategy, ids));
    std::size_t failed = 0, unparsed = 0;
    for (const auto& r : fresh) {
        if (!r.ok()) {
            ++failed;
            std::cerr << "error: " << r.incident_id << ": " << *r.error << "\n";
        } else if (r.parse_failure()) {
            ++unparsed;
        }
    }
    std::cerr << prompt::to_string(*strategy) << ": " << fresh.size() << " run, " << (ids.size() - todo.size())
              << " skipped, " << failed << " failed, " << unparsed << " unparsed; wrote " << runs_file.string() << "\n";
    return 0;
}

int cmd_monitor_run(const Config& cfg, const std::string& task_name, const std::string& case_name, bool resume) {
    const auto task = parse_task(task_name);
    if (!task) throw UsageError("unknown task '" + task_name + "'");
    const auto c = prompt::parse_case(case_name);
    if (!c) throw UsageError("unknown case '" + case_name + "'");
    const auto corpus = load_corpus(cfg.get("corpus"));

    const fs::path runs_file = fs::path(cfg.get("out")) / kMonitorRunsFile;
    const auto existing = read_monitor_runs(runs_file);
    std::vector<std::string> todo;
    for (const auto* m : corpus.labeled_monitors(*task)) todo.push_back(m->id);
    const auto total = todo.size();
    if (resume) {
        std::set<std::string> done;
        for (const auto& r : existing)
            if (r.task == *task && r.monitor_case == *c && r.ok()) done.insert(r.monitor_id);
        std::erase_if(todo, [&](const std::string& id) { return done.count(id) > 0; });
    }

    auto provider = make_provider(cfg);
    const llm::Gateway gateway(*provider, cfg.get_count("concurrency", 1));
    pipeline::MonitorOptions opts;
    opts.model = cfg.get("model");
    std::vector<MonitorRunRecord> fresh;
    if (total == 0 || !todo.empty()) fresh = pipeline::run_monitor_batch(corpus, gateway, *task, *c, opts, &todo);

    write_monitor_runs(runs_file, pipeline::merge_monitor_runs(existing, fresh, *task, *c));
    std::size_t failed = 0, unparsed = 0;
    for (const auto& r : fresh) {
        if (!r.ok()) {
            ++failed;
            std::cerr << "error: " << r.monitor_id << ": " << *r.error << "\n";
        } else if (r.predicted.parse_failure()) {
            ++unparsed;
        }
    }
    std::cerr << to_string(*task) << "/" << prompt::to_string(*c) << ": " << fresh.size() << " run, "
              << (total - todo.size()) << " skipped, " << failed << " failed, " << unparsed << " unparsed; wrote "
              << runs_file.string() << "\n";
    return 0;
}

int cmd_eval_rca(const Config& cfg, const std::string& runs) {
    const auto corpus = load_corpus(cfg.get("corpus"));
    if (!fs::exists(runs)) throw MissingFile(runs);
    const auto records = read_rca_runs(runs);
    const auto embedder = make_embedder(cfg, corpus);
    const auto rep = report::build_report(records, {}, corpus, *embedder);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << report::render_rca_table(rep.rca);
    return 0;
}

int cmd_eval_monitor(const Config& cfg, const std::string& runs) {
    const auto corpus = load_corpus(cfg.get("corpus"));
    if (!fs::exists(runs)) throw MissingFile(runs);
    const auto records = read_monitor_runs(runs);
    HashingEmbedder unused;
    const auto rep = report::build_report({}, records, corpus, unused);
    for (std::size_t i = 0; i < rep.monitor.size(); ++i)
        std::cout << (i ? "\n" : "") << report::render_class_table(rep.monitor[i], corpus.ontology());
    return 0;
}

int cmd_report(const Config& cfg, std::string rca_runs, std::string monitor_runs) {
    const fs::path out = cfg.get("out");
    if (rca_runs.empty()) rca_runs = (out / kRcaRunsFile).string();
    if (monitor_runs.empty()) monitor_runs = (out / kMonitorRunsFile).string();
    if (!fs::exists(rca_runs) && !fs::exists(monitor_runs))
        throw MissingFile(rca_runs + " or " + monitor_runs + " (run `xlc rca run` or `xlc monitor run` first)");
    const auto corpus = load_corpus(cfg.get("corpus"));
    const auto embedder = make_embedder(cfg, corpus);
    const auto rep = report::build_report(read_rca_runs(rca_runs), read_monitor_runs(monitor_runs), corpus, *embedder);
    const auto textv = report::render_text(rep, corpus.ontology());
    write_file(out / "report.json", report::to_json(rep).dump(2) + "\n");
    write_file(out / "report.txt", textv);
    std::cout << textv;
    std::cerr << "wrote " << (out / "report.json").string() << " and " << (out / "report.txt").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xlc: context-augmented incident root-cause and monitor classification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::map<std::string, std::string> flag_values;
    std::vector<std::pair<std::string, CLI::Option*>> flag_opts;
    const auto global = [&](const std::string& name, const std::string& key, const std::string& help) {
        flag_opts.emplace_back(key, app.add_option(name, flag_values[key], help));
    };
    global("--corpus", "corpus", "corpus directory");
    global("--out", "out", "output directory for runs and reports");
    global("--index", "index", "index directory (default <out>/index)");
    global("--provider", "provider", "stub, replay or remote");
    global("--fixtures", "fixtures", "replay fixture directory");
    global("--record", "record", "write every response as a replay fixture into this directory");
    global("--endpoint", "endpoint", "chat-completions URL for the remote provider");
    global("--model", "model", "model name sent to the provider");
    global("--k", "k", "number of in-context examples");
    global("--stack-limit", "stack_limit", "stack frames kept before eliding");
    global("--concurrency", "concurrency", "maximum in-flight provider calls");
    global("--embedder", "embedder", "hashing or remote");
    app.add_option("--config", g.config_file, "key = value config file (default ./xlc.toml if present)");
    app.add_flag("-v,--verbose", g.verbose, "print the effective configuration and extra diagnostics");

    // synth gen
    auto* synth_cmd = app.add_subcommand("synth", "synthetic corpus generation")->require_subcommand(1);
    auto* gen = synth_cmd->add_subcommand("gen", "generate a synthetic corpus");
    synth::SynthSpec spec;
    std::string spec_file, synth_dir;
    std::map<std::string, CLI::Option*> spec_opts;
    spec_opts["seed"] = gen->add_option("--seed", spec.seed, "random seed");
    spec_opts["n_services"] = gen->add_option("--services", spec.n_services, "number of services");
    spec_opts["n_incidents"] = gen->add_option("--incidents", spec.n_incidents, "number of incidents");
    spec_opts["n_monitors"] = gen->add_option("--monitors", spec.n_monitors, "number of monitors");
    spec_opts["dependency_failure_fraction"] =
        gen->add_option("--df-fraction", spec.dependency_failure_fraction, "fraction of dependency failures");
    spec_opts["edge_density"] = gen->add_option("--density", spec.edge_density, "dependency edge density");
    gen->add_option("--spec", spec_file, "key = value spec file; flags override it");
    gen->add_option("--dir", synth_dir, "target directory (default: the corpus path)");

    auto* ingest = app.add_subcommand("ingest", "validate a corpus and print counts");

    auto* sanitize_cmd = app.add_subcommand("sanitize", "clean text from a file or standard input");
    std::string sanitize_input;
    sanitize_cmd->add_option("input", sanitize_input, "input file (default: standard input)");

    auto* summarize = app.add_subcommand("summarize", "summarize incident fields and service descriptions in place");

    auto* index_cmd = app.add_subcommand("index", "retrieval index")->require_subcommand(1);
    auto* index_build = index_cmd->add_subcommand("build", "embed all incidents and write the index");

    auto* rca = app.add_subcommand("rca", "root-cause recommendation")->require_subcommand(1);
    auto* rca_run = rca->add_subcommand("run", "run one prompting strategy over the evaluation incidents");
    std::string strategy, ids_file;
    bool rca_resume = false;
    rca_run->add_option("--strategy", strategy, "prompting strategy")
        ->required()
        ->check(CLI::IsMember({"nodep", "dep", "inc-nodep", "inc-dep"}, CLI::ignore_case));
    rca_run->add_option("--ids", ids_file, "file with one incident id per line (default: all incidents)");
    rca_run->add_flag("--resume", rca_resume, "skip incidents that already have a successful record");

    auto* monitor = app.add_subcommand("monitor", "monitor classification")->require_subcommand(1);
    auto* monitor_run = monitor->add_subcommand("run", "classify every labeled monitor");
    std::string task_name, case_name;
    bool monitor_resume = false;
    monitor_run->add_option("--task", task_name, "ontology dimension")
        ->required()
        ->check(CLI::IsMember({"resource", "slo"}, CLI::ignore_case));
    monitor_run->add_option("--case", case_name, "context case")
        ->required()
        ->check(CLI::IsMember({"c1", "c2", "c3", "c4"}, CLI::ignore_case));
    monitor_run->add_flag("--resume", monitor_resume, "skip monitors that already have a successful record");

    auto* eval = app.add_subcommand("eval", "score prediction records")->require_subcommand(1);
    auto* eval_rca = eval->add_subcommand("rca", "text metrics and dependency-failure F1");
    auto* eval_monitor = eval->add_subcommand("monitor", "per-class precision, recall, F1 and accuracy");
    std::string rca_runs_file, monitor_runs_file;
    eval_rca->add_option("--runs", rca_runs_file, "rca_runs.jsonl")->required();
    eval_monitor->add_option("--runs", monitor_runs_file, "monitor_runs.jsonl")->required();

    auto* report_cmd = app.add_subcommand("report", "write report.json and report.txt");
    std::string report_rca, report_monitor;
    report_cmd->add_option("--rca-runs", report_rca, "default <out>/rca_runs.jsonl");
    report_cmd->add_option("--monitor-runs", report_monitor, "default <out>/monitor_runs.jsonl");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        return 2;
    }

    try {
        for (const auto& [key, opt] : flag_opts)
            if (opt->count() > 0) g.flags[key] = flag_values[key];
        const auto cfg = resolve(g);
        cfg.get_count("k", 1);
        cfg.get_count("concurrency", 1);
        cfg.get_count("stack_limit", 1);

        if (gen->parsed()) {
            std::map<std::string, bool> given;
            for (const auto& [k, opt] : spec_opts) given[k] = opt->count() > 0;
            return cmd_synth(cfg, spec_file, spec, given, synth_dir);
        }
        if (ingest->parsed()) return cmd_ingest(cfg);
        if (sanitize_cmd->parsed()) return cmd_sanitize(cfg, sanitize_input, g.verbose);
        if (summarize->parsed()) return cmd_summarize(cfg);
        if (index_build->parsed()) return cmd_index_build(cfg);
        if (rca_run->parsed()) return cmd_rca_run(cfg, strategy, ids_file, rca_resume);
        if (monitor_run->parsed()) return cmd_monitor_run(cfg, task_name, case_name, monitor_resume);
        if (eval_rca->parsed()) return cmd_eval_rca(cfg, rca_runs_file);
        if (eval_monitor->parsed()) return cmd_eval_monitor(cfg, monitor_runs_file);
        if (report_cmd->parsed()) return cmd_report(cfg, report_rca, report_monitor);
        std::cerr << app.help();
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const SpecError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
