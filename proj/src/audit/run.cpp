#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <algorithm>

#include "audit/few_shot.hpp"
#include "flowaudit/audit.hpp"
#include "flowaudit/errors.hpp"
#include "flowaudit/explorer.hpp"
#include "flowaudit/frontend.hpp"
#include "flowaudit/validators.hpp"

namespace flowaudit {

namespace {

void validate_config(const AuditConfig& config) {
    if (config.max_depth < 1)
        throw ConfigInvalid("max depth (K) must be >= 1");
    if (config.bug_types.empty())
        throw ConfigInvalid("at least one bug type is required");
    if (config.parallel_sources < 1 || config.parallel_requests < 1)
        throw ConfigInvalid("parallelism limits must be >= 1");
    if (config.decoding.temperature < 0.0 || config.decoding.temperature > 1.0)
        throw ConfigInvalid("temperature must lie in [0, 1]");
    if (!config.mock_dir && config.http.endpoint.empty())
        throw ConfigInvalid("no backend: set --mock-dir or an HTTP endpoint");
    if (config.repo_root.empty())
        throw ConfigInvalid("repository root is required");
}

std::string read_file_if_exists(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        return {};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<BugKind> normalized_bug_types(const std::vector<BugKind>& kinds) {
    std::vector<BugKind> out;
    for (BugKind kind : kinds)
        if (std::find(out.begin(), out.end(), kind) == out.end())
            out.push_back(kind);
    return out;
}

bool same_value_node(const ProgramValue& a, const ProgramValue& b) {
    return a.variable == b.variable && a.function == b.function &&
           a.location.line == b.location.line;
}

} // namespace

bool emission_chain_check(const BugCandidate& candidate, const FunctionInventory& inventory,
                          const CallGraph& graph, std::string* why) {
    auto fail = [&](const std::string& reason) {
        if (why)
            *why = reason;
        return false;
    };
    for (const auto& fact : candidate.chain) {
        for (const ProgramValue* value : {&fact.src, &fact.dst}) {
            const FunctionRecord* fn = inventory.by_id(value->function);
            if (!fn)
                return fail("fact endpoint names unknown function " + value->function);
            if (!fn->contains_line(value->location.line))
                return fail("fact endpoint " + value->variable + "@" +
                            std::to_string(value->location.line) + " outside " + fn->name);
        }
    }
    for (std::size_t i = 0; i + 1 < candidate.chain.size(); ++i)
        if (!same_value_node(candidate.chain[i].dst, candidate.chain[i + 1].src))
            return fail("chain breaks between fact " + std::to_string(i + 1) + " and " +
                        std::to_string(i + 2));
    for (const auto& fact : candidate.chain) {
        if (!fact.boundary) {
            if (fact.src.function != fact.dst.function)
                return fail("non-boundary fact spans two functions");
            continue;
        }
        bool matched = false;
        if (fact.dst.role == ValueRole::Parameter) {
            // argument-to-parameter hop: a call edge at the source line must
            // target the destination function at a matching parameter
            for (const CallGraphEdge* edge : graph.edges_to(fact.dst.function)) {
                if (edge->site.caller != fact.src.function ||
                    edge->site.location.line != fact.src.location.line)
                    continue;
                const FunctionRecord* callee = inventory.by_id(fact.dst.function);
                if (!callee)
                    continue;
                for (const auto& param : callee->parameters)
                    if (param.name == fact.dst.variable)
                        matched = true;
            }
            if (!matched)
                return fail("argument boundary has no matching call edge for " +
                            to_string(fact));
        } else {
            // return-to-receiver hop
            const FunctionRecord* callee = inventory.by_id(fact.src.function);
            if (!callee || !is_return_statement_line(*callee, fact.src.location.line))
                return fail("return boundary does not start at a return statement");
            for (const CallGraphEdge* edge : graph.edges_to(fact.src.function))
                if (edge->site.caller == fact.dst.function &&
                    edge->site.location.line == fact.dst.location.line &&
                    edge->site.receiver_assignment &&
                    *edge->site.receiver_assignment == fact.dst.variable)
                    matched = true;
            if (!matched)
                return fail("return boundary has no matching call edge for " + to_string(fact));
        }
    }
    return true;
}

AuditResult run_audit(const AuditConfig& config, DiagnosticLog* diag) {
    validate_config(config);
    DiagnosticLog local_diag;
    if (!diag)
        diag = &local_diag;

    const auto start = std::chrono::steady_clock::now();
    AuditResult result;
    result.ledger = std::make_shared<RunLedger>();
    result.memory_dump = nlohmann::json::object();

    auto finish = [&]() {
        result.ledger->set_wall_seconds(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        result.diagnostics = diag->snapshot();
    };

    FunctionInventory inventory;
    try {
        inventory = index_repository(config.repo_root, {}, diag);
    } catch (const NoSupportedFiles&) {
        diag->warn("audit", "no parseable source files under " + config.repo_root.string() +
                                "; nothing to scan");
        finish();
        return result;
    }
    const CallGraph graph = build_call_graph(inventory);
    result.inventory_dump = dump_inventory(inventory);
    for (const auto& fn : inventory.functions)
        result.function_index[fn.id] = {fn.name, fn.file};

    std::unique_ptr<Backend> backend;
    if (config.mock_dir)
        backend = std::make_unique<MockBackend>(*config.mock_dir);
    else
        backend = std::make_unique<HttpBackend>(config.http);

    GatewayOptions gateway_options;
    gateway_options.parallel_requests = config.parallel_requests;
    Gateway gateway(*backend, *result.ledger, gateway_options, diag);

    ExplorerOptions explorer_options;
    explorer_options.max_depth = config.max_depth;
    explorer_options.use_cache = !config.no_cache;
    explorer_options.use_validators = !config.no_validators;
    explorer_options.abstraction_step = !config.no_abstraction;
    explorer_options.decoding = config.decoding;

    std::vector<BugTypeSpec> specs;
    for (BugKind kind : normalized_bug_types(config.bug_types))
        specs.push_back(default_bug_spec(kind));
    if (config.bug_config_json)
        apply_bug_config(specs, *config.bug_config_json);
    for (auto& spec : specs) {
        spec.few_shot = default_few_shot(spec.kind);
        if (config.few_shot_dir) {
            const std::string text = read_file_if_exists(*config.few_shot_dir / (spec.name + ".txt"));
            if (!text.empty())
                spec.few_shot = text;
        }
    }

    long cache_hits = 0;
    long cache_misses = 0;
    std::vector<BugReport> reports;

    for (const auto& spec : specs) {
        AgentMemory memory; // shared across this bug type's scanning rounds
        Explorer explorer(inventory, graph, memory, gateway, explorer_options, diag);
        const std::vector<ProgramValue> sources = find_sources(inventory, spec);

        std::vector<std::vector<BugCandidate>> per_source(sources.size());
        const int workers =
            static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(config.parallel_sources),
                                                   sources.size()));
        if (workers <= 1) {
            for (std::size_t i = 0; i < sources.size(); ++i)
                per_source[i] = explorer.explore_from_source(sources[i], spec);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (;;) {
                        const std::size_t i = next.fetch_add(1);
                        if (i >= sources.size())
                            return;
                        per_source[i] = explorer.explore_from_source(sources[i], spec);
                    }
                });
            for (auto& t : pool)
                t.join();
        }

        for (std::size_t i = 0; i < sources.size(); ++i) {
            for (auto& candidate : per_source[i]) {
                if (config.no_validators) {
                    candidate.feasibility = Feasibility::Skipped;
                } else {
                    try {
                        const FeasibilityVerdict verdict = validate_feasibility(
                            candidate, inventory, gateway, config.decoding, diag);
                        candidate.feasibility = verdict.verdict;
                        candidate.feasibility_note = verdict.explanation;
                        if (verdict.verdict == Feasibility::Contradiction) {
                            diag->info("audit", "candidate from " + value_key(candidate.source) +
                                                    " discarded: path conditions contradict");
                            continue;
                        }
                    } catch (const BackendUnreachable& e) {
                        candidate.feasibility = Feasibility::Feasible;
                        candidate.feasibility_note = "feasibility screen skipped: backend unreachable";
                        diag->warn("audit", std::string("feasibility screen skipped: ") + e.what());
                    }
                }
                std::string why;
                if (!emission_chain_check(candidate, inventory, graph, &why)) {
                    diag->error("audit", "candidate " + value_key(candidate.source) +
                                             " failed the emission connectivity re-check (" + why +
                                             "); dropped");
                    continue;
                }
                reports.push_back({std::move(candidate), spec.name});
            }
        }

        result.memory_dump[spec.name] = memory.dump();
        cache_hits += memory.stats().hits;
        cache_misses += memory.stats().misses;
    }

    std::stable_sort(reports.begin(), reports.end(), [](const BugReport& a, const BugReport& b) {
        const ProgramValue& sa = a.candidate.source;
        const ProgramValue& sb = b.candidate.source;
        return std::tie(a.bug_name, sa.location, sa.variable) <
               std::tie(b.bug_name, sb.location, sb.variable);
    });
    int counter = 1;
    for (auto& report : reports)
        report.candidate.id = "r" + std::to_string(counter++);
    result.reports = std::move(reports);

    result.ledger->set_cache_stats(cache_hits, cache_misses);
    finish();

    if (result.ledger->attempted_queries() > 0 && result.ledger->succeeded_queries() == 0)
        throw BackendUnreachable("every model query failed (" +
                                 std::to_string(result.ledger->attempted_queries()) + " attempts)");
    return result;
}

} // namespace flowaudit
