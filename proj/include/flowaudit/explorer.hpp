#pragma once

#include <string>
#include <vector>

#include "flowaudit/bugspec.hpp"
#include "flowaudit/candidate.hpp"
#include "flowaudit/diag.hpp"
#include "flowaudit/gateway.hpp"
#include "flowaudit/memory.hpp"
#include "flowaudit/types.hpp"

namespace flowaudit {

struct ExplorerOptions {
    int max_depth = 4;          // calling-context bound K
    bool use_cache = true;      // --no-cache clears
    bool use_validators = true; // --no-validators clears the order screen
    bool abstraction_step = true; // --no-abstraction clears prompt step 2
    int reask_limit = 2;        // bounded re-query on wholly malformed responses
    DecodingConfig decoding;
};

/// The demand-driven traversal engine: per-source worklist exploration,
/// per-function analysis through the gateway (cache-first), boundary
/// propagation over the call graph under the depth bound, and candidate
/// assembly per the bug's report rule.
class Explorer {
public:
    Explorer(const FunctionInventory& inventory, const CallGraph& graph, AgentMemory& memory,
             Gateway& gateway, ExplorerOptions options = {}, DiagnosticLog* diag = nullptr);

    /// Runs one scanning round to exhaustion; returns candidates
    /// pre-feasibility-validation, in deterministic order.
    std::vector<BugCandidate> explore_from_source(const ProgramValue& source,
                                                  const BugTypeSpec& bug);

    /// Cache-first per-function analysis: on a miss renders the prompt,
    /// queries, parses, order-validates and stores. Degraded analyses
    /// return empty (logged) and are cached as empty.
    std::vector<PathRecord> analyze_function(const std::string& function, const ProgramValue& value,
                                             const BugTypeSpec& bug);

    /// Expands one escape into successor tasks via the call graph.
    /// Tasks beyond the depth bound are never produced.
    std::vector<ExplorationTask> propagate_across_boundary(const EscapeAnnotation& escape,
                                                           int depth) const;

private:
    struct RoundState;

    void process_task(const ExplorationTask& task, const BugTypeSpec& bug, RoundState& state);
    void emit_candidate(BugCandidate candidate, RoundState& state);
    std::vector<PathRecord> analyze_function_impl(const std::string& function,
                                                  const ProgramValue& value, const BugTypeSpec& bug,
                                                  const std::string& source_key);
    std::vector<PathRecord> run_analysis(const FunctionRecord& function, const ProgramValue& value,
                                         const BugTypeSpec& bug, const std::string& source_key);

    const FunctionInventory& inventory_;
    const CallGraph& graph_;
    AgentMemory& memory_;
    Gateway& gateway_;
    ExplorerOptions options_;
    DiagnosticLog* diag_;
};

} // namespace flowaudit
