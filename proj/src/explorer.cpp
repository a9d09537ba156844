#include "flowaudit/explorer.hpp"

#include <algorithm>
#include <set>

#include "flowaudit/errors.hpp"
#include "flowaudit/validators.hpp"

namespace flowaudit {

namespace {

/// Line-level endpoint identity: response facts carry no columns.
bool value_matches(const ProgramValue& a, const ProgramValue& b) {
    return a.variable == b.variable && a.location.line == b.location.line &&
           a.function == b.function;
}

void chains_dfs(const ProgramValue& tip, const std::vector<DataFlowFact>& facts,
                std::vector<bool>& used, std::vector<DataFlowFact>& current,
                std::vector<std::vector<DataFlowFact>>& out) {
    if (current.size() > 64) { // runaway guard for pathological fact sets
        out.push_back(current);
        return;
    }
    bool extended = false;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        if (used[i] || !value_matches(facts[i].src, tip))
            continue;
        used[i] = true;
        current.push_back(facts[i]);
        chains_dfs(facts[i].dst, facts, used, current, out);
        current.pop_back();
        used[i] = false;
        extended = true;
    }
    if (!extended)
        out.push_back(current);
}

/// Maximal propagation chains rooted at `origin` within one path's facts.
std::vector<std::vector<DataFlowFact>> enumerate_chains(const ProgramValue& origin,
                                                        const std::vector<DataFlowFact>& facts) {
    std::vector<std::vector<DataFlowFact>> out;
    std::vector<bool> used(facts.size(), false);
    std::vector<DataFlowFact> current;
    chains_dfs(origin, facts, used, current, out);
    return out;
}

/// Facts linking `origin` to a node matching `target` along one path,
/// empty chain when the target is the origin itself.
std::optional<std::vector<DataFlowFact>> connecting_chain(const ProgramValue& origin,
                                                          const std::vector<DataFlowFact>& facts,
                                                          const ProgramValue& target) {
    if (value_matches(origin, target))
        return std::vector<DataFlowFact>{};
    for (const auto& chain : enumerate_chains(origin, facts))
        for (std::size_t k = 1; k <= chain.size(); ++k)
            if (value_matches(chain[k - 1].dst, target))
                return std::vector<DataFlowFact>(chain.begin(),
                                                 chain.begin() + static_cast<long>(k));
    return std::nullopt;
}

const ProgramValue* match_sink(const std::vector<ProgramValue>& sinks, const ProgramValue& v) {
    for (const auto& s : sinks)
        if (s.function == v.function && s.variable == v.variable &&
            s.location.line == v.location.line)
            return &s;
    return nullptr;
}

bool task_less(const ExplorationTask& a, const ExplorationTask& b) {
    return std::tie(a.value.location.file, a.value.location.line, a.value.location.column,
                    a.value.variable, a.function) <
           std::tie(b.value.location.file, b.value.location.line, b.value.location.column,
                    b.value.variable, b.function);
}

} // namespace

struct Explorer::RoundState {
    ProgramValue source;
    std::string source_key;
    std::vector<ProgramValue> sinks;
    std::vector<BugCandidate> candidates;
    std::set<std::string> seen_signatures;
    std::vector<ExplorationTask> next;
    bool global_escape = false;
    bool depth_truncated = false;
};

Explorer::Explorer(const FunctionInventory& inventory, const CallGraph& graph, AgentMemory& memory,
                   Gateway& gateway, ExplorerOptions options, DiagnosticLog* diag)
    : inventory_(inventory), graph_(graph), memory_(memory), gateway_(gateway),
      options_(options), diag_(diag) {}

std::vector<BugCandidate> Explorer::explore_from_source(const ProgramValue& source,
                                                        const BugTypeSpec& bug) {
    RoundState state;
    state.source = source;
    state.source_key = value_key(source);
    state.sinks = find_sinks(inventory_, bug);

    std::vector<ExplorationTask> level;
    level.push_back({source.function, source, 1, {}, {}});
    while (!level.empty()) {
        std::stable_sort(level.begin(), level.end(), task_less);
        for (const auto& task : level)
            process_task(task, bug, state);
        level = std::move(state.next);
        state.next.clear();
    }

    int counter = 1;
    for (auto& candidate : state.candidates) {
        candidate.id = "c" + std::to_string(counter++);
        candidate.global_escape = state.global_escape;
        candidate.depth_truncated = state.depth_truncated;
    }
    return state.candidates;
}

void Explorer::process_task(const ExplorationTask& task, const BugTypeSpec& bug,
                            RoundState& state) {
    const FunctionRecord* fn = inventory_.by_id(task.function);
    if (!fn) {
        if (diag_)
            diag_->warn("explorer", "task references unknown function " + task.function);
        return;
    }
    const std::vector<PathRecord> records =
        analyze_function_impl(task.function, task.value, bug, state.source_key);

    for (const auto& record : records) {
        const auto chains = enumerate_chains(task.value, record.facts);
        bool sink_hit = false;

        for (const auto& chain : chains) {
            for (std::size_t k = 1; k <= chain.size(); ++k) {
                const ProgramValue* sink = match_sink(state.sinks, chain[k - 1].dst);
                if (!sink)
                    continue;
                sink_hit = true;
                if (bug.report_rule != ReportRule::ReportIfSinkReached)
                    continue;
                BugCandidate candidate;
                candidate.bug = bug.kind;
                candidate.source = state.source;
                candidate.segments = task.segments;
                candidate.segments.push_back({task.function, record});
                candidate.chain = task.chain;
                candidate.chain.insert(candidate.chain.end(), chain.begin(),
                                       chain.begin() + static_cast<long>(k));
                candidate.terminal = TerminalKind::SinkReached;
                candidate.sink = *sink;
                candidate.order_validated = options_.use_validators;
                emit_candidate(std::move(candidate), state);
            }
        }

        bool escaped = false;
        for (const auto& escape : record.escapes) {
            auto connection = connecting_chain(task.value, record.facts, escape.value);
            if (!connection) {
                if (diag_)
                    diag_->warn("explorer", fn->name + "/" + record.path_id + ": escape value " +
                                                escape.value.variable + "@" +
                                                std::to_string(escape.value.location.line) +
                                                " is not reached by the tracked value; ignored");
                continue;
            }
            if (escape.kind == EscapeKind::ToGlobal) {
                state.global_escape = true;
                escaped = true;
                continue;
            }
            if (task.depth + 1 > options_.max_depth) {
                state.depth_truncated = true;
                escaped = true;
                continue;
            }
            std::vector<ExplorationTask> successors = propagate_across_boundary(escape, task.depth);
            escaped = true;
            if (successors.empty())
                continue; // unresolved boundary (already logged)
            for (auto& successor : successors) {
                successor.segments = task.segments;
                successor.segments.push_back({task.function, record});
                std::vector<DataFlowFact> chain = task.chain;
                chain.insert(chain.end(), connection->begin(), connection->end());
                chain.insert(chain.end(), successor.chain.begin(), successor.chain.end());
                successor.chain = std::move(chain);
                state.next.push_back(std::move(successor));
            }
        }

        if (bug.report_rule == ReportRule::ReportIfNoSinkReached && !sink_hit && !escaped) {
            // A complete path family on which the tracked allocation neither
            // reaches a deallocation sink nor leaves the explored region.
            BugCandidate candidate;
            candidate.bug = bug.kind;
            candidate.source = state.source;
            candidate.segments = task.segments;
            candidate.segments.push_back({task.function, record});
            candidate.chain = task.chain;
            const std::vector<DataFlowFact>* longest = nullptr;
            for (const auto& chain : chains)
                if (!longest || chain.size() > longest->size())
                    longest = &chain;
            if (longest)
                candidate.chain.insert(candidate.chain.end(), longest->begin(), longest->end());
            candidate.terminal = TerminalKind::NoSinkOnPath;
            candidate.order_validated = options_.use_validators;
            emit_candidate(std::move(candidate), state);
        }
    }
}

void Explorer::emit_candidate(BugCandidate candidate, RoundState& state) {
    std::string signature = chain_signature(candidate);
    if (candidate.terminal == TerminalKind::NoSinkOnPath) {
        for (const auto& segment : candidate.segments)
            signature += "|" + segment.function + ":" + segment.path.path_id;
    }
    if (!state.seen_signatures.insert(signature).second)
        return; // identical fact sequences are emitted once
    state.candidates.push_back(std::move(candidate));
}

std::vector<PathRecord> Explorer::analyze_function(const std::string& function,
                                                   const ProgramValue& value,
                                                   const BugTypeSpec& bug) {
    return analyze_function_impl(function, value, bug, value_key(value));
}

std::vector<PathRecord> Explorer::analyze_function_impl(const std::string& function,
                                                        const ProgramValue& value,
                                                        const BugTypeSpec& bug,
                                                        const std::string& source_key) {
    const FunctionRecord* fn = inventory_.by_id(function);
    if (!fn) {
        if (diag_)
            diag_->warn("explorer", "analyze_function: unknown function " + function);
        return {};
    }
    if (options_.use_cache) {
        const AgentMemory::ClaimResult claim = memory_.claim(function, value);
        if (claim == AgentMemory::ClaimResult::Ready) {
            auto records = memory_.lookup(function, value);
            return records ? *records : std::vector<PathRecord>{};
        }
        std::vector<PathRecord> records;
        try {
            records = run_analysis(*fn, value, bug, source_key);
        } catch (...) {
            memory_.store(function, value, {});
            throw;
        }
        memory_.store(function, value, records);
        return records;
    }
    return run_analysis(*fn, value, bug, source_key);
}

std::vector<PathRecord> Explorer::run_analysis(const FunctionRecord& function,
                                               const ProgramValue& value, const BugTypeSpec& bug,
                                               const std::string& source_key) {
    RenderOptions render_options;
    render_options.include_abstraction_step = options_.abstraction_step;
    PromptRequest prompt;
    try {
        prompt = render_analysis_prompt(function, value, bug, bug.few_shot, render_options,
                                        options_.decoding);
    } catch (const Error& e) {
        if (diag_)
            diag_->warn("explorer", std::string("prompt rendering failed: ") + e.what());
        return {};
    }

    AnalysisParse parse;
    bool query_failed = false;
    for (int attempt = 0; attempt <= options_.reask_limit; ++attempt) {
        ModelResponse response;
        try {
            response = gateway_.query(
                prompt, attempt == 0 ? QueryClass::Analysis : QueryClass::Reask, source_key);
        } catch (const Error& e) {
            if (diag_)
                diag_->warn("explorer",
                            function.name + "/" + value.variable + ": query failed: " + e.what());
            query_failed = true;
            break;
        }
        parse = parse_analysis_response(response.raw_text, function);
        if (parse.paths.empty() && !parse.parse_errors.empty() &&
            attempt < options_.reask_limit) {
            if (diag_)
                diag_->info("explorer", function.name + ": malformed analysis response; re-asking");
            continue;
        }
        break;
    }
    for (const auto& error : parse.parse_errors)
        if (diag_)
            diag_->warn("gateway", function.name + ": " + error);

    std::vector<PathRecord> records;
    if (options_.use_validators) {
        for (auto& path : parse.paths) {
            PathValidation validation = validate_path_record(function, std::move(path));
            for (const auto& rejection : validation.rejections)
                if (diag_)
                    diag_->warn("validators", function.name + ": " + rejection);
            if (validation.record)
                records.push_back(std::move(*validation.record));
        }
    } else {
        records = std::move(parse.paths);
        for (auto& record : records)
            record.order_validated = true; // screen disabled; cleared for storage as-is
    }

    if (records.empty() && !query_failed)
        if (diag_)
            diag_->warn("explorer", "analysis degraded for " + function.name + " / " +
                                        value.variable + "@" +
                                        std::to_string(value.location.line) +
                                        ": no usable paths survived");
    return records;
}

std::vector<ExplorationTask> Explorer::propagate_across_boundary(const EscapeAnnotation& escape,
                                                                 int depth) const {
    std::vector<ExplorationTask> out;
    if (depth + 1 > options_.max_depth)
        return out;

    if (escape.kind == EscapeKind::ToGlobal)
        return out; // recorded by the caller; globals are not traversed

    if (escape.kind == EscapeKind::ToCalleeArgument) {
        if (!escape.call_site || !escape.argument_index) {
            if (diag_)
                diag_->warn("explorer", "argument escape without a call site; ignored");
            return out;
        }
        const auto edges = graph_.edges_at(escape.call_site->caller, escape.call_site->location.line,
                                           escape.call_site->callee_name);
        if (edges.empty()) {
            if (diag_)
                diag_->warn("explorer", "unresolved boundary: no callee named '" +
                                            escape.call_site->callee_name + "' at line " +
                                            std::to_string(escape.call_site->location.line));
            return out;
        }
        for (const CallGraphEdge* edge : edges) {
            const FunctionRecord* callee = inventory_.by_id(edge->callee_id);
            if (!callee || static_cast<std::size_t>(*escape.argument_index) >=
                               callee->parameters.size()) {
                if (diag_)
                    diag_->warn("explorer", "unresolved boundary: argument index " +
                                                std::to_string(*escape.argument_index) +
                                                " has no parameter in callee " +
                                                escape.call_site->callee_name);
                continue;
            }
            const Parameter& param = callee->parameters[static_cast<std::size_t>(
                *escape.argument_index)];
            ExplorationTask task;
            task.function = callee->id;
            task.value = {param.name,
                          {callee->file, param.line > 0 ? param.line : callee->span_begin,
                           param.column},
                          callee->id,
                          ValueRole::Parameter};
            task.depth = depth + 1;
            task.chain.push_back({escape.value, task.value, true});
            out.push_back(std::move(task));
        }
    } else { // ToCallerReturn
        const auto edges = graph_.edges_to(escape.value.function);
        for (const CallGraphEdge* edge : edges) {
            if (!edge->site.receiver_assignment)
                continue; // a discarded return value does not propagate
            const FunctionRecord* caller = inventory_.by_id(edge->site.caller);
            if (!caller) {
                if (diag_)
                    diag_->warn("explorer", "unresolved boundary: caller " + edge->site.caller);
                continue;
            }
            ExplorationTask task;
            task.function = caller->id;
            task.value = {*edge->site.receiver_assignment,
                          {caller->file, edge->site.location.line, 0},
                          caller->id,
                          ValueRole::Intermediate};
            task.depth = depth + 1;
            task.chain.push_back({escape.value, task.value, true});
            out.push_back(std::move(task));
        }
        if (out.empty() && diag_)
            diag_->info("explorer", "return escape of " + escape.value.variable +
                                        " has no receiving caller; chain ends");
    }
    std::stable_sort(out.begin(), out.end(), task_less);
    return out;
}

} // namespace flowaudit
