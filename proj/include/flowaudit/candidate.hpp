#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowaudit/bugspec.hpp"
#include "flowaudit/memory.hpp"

namespace flowaudit {

struct ChainSegment {
    std::string function; // FunctionRecord id
    PathRecord path;
};

enum class TerminalKind { SinkReached, NoSinkOnPath };

enum class Feasibility { Pending, Feasible, Contradiction, Skipped };

const char* to_string(Feasibility f);

/// An assembled cross-function trail of data-flow facts from one source,
/// pre- or post-feasibility-validation.
struct BugCandidate {
    std::string id;
    BugKind bug = BugKind::NullDereference;
    ProgramValue source;
    std::vector<ChainSegment> segments;  // at most K
    std::vector<DataFlowFact> chain;     // connected; boundary facts link segments
    TerminalKind terminal = TerminalKind::SinkReached;
    std::optional<ProgramValue> sink;    // absent for NoSinkOnPath
    bool order_validated = false;
    Feasibility feasibility = Feasibility::Pending;
    std::string feasibility_note;
    bool global_escape = false;   // some path wrote the value to a global (untraversed)
    bool depth_truncated = false; // exploration cut off at the depth bound
};

/// Deterministic identity of a candidate's fact sequence, used for
/// de-duplication and for scripting feasibility mock responses.
std::string chain_signature(const BugCandidate& candidate);

/// One worklist item: analyze `value` inside `function` at `depth` functions
/// from the originating source.
struct ExplorationTask {
    std::string function;
    ProgramValue value;
    int depth = 1;
    std::vector<ChainSegment> segments; // provenance back to the source
    std::vector<DataFlowFact> chain;
};

} // namespace flowaudit
