#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowaudit/candidate.hpp"
#include "flowaudit/gateway.hpp"
#include "flowaudit/memory.hpp"
#include "flowaudit/types.hpp"

namespace flowaudit {

enum class OrderVerdict { Consistent, Violation };

struct OrderVerdictedFact {
    DataFlowFact fact;
    OrderVerdict verdict = OrderVerdict::Consistent;
    std::string reason; // set on Violation
};

/// Control-flow-order alignment: a fact u@s1 -> v@s2 is Consistent iff s1
/// can execute before s2 (MustPrecede/MayPrecede), or s1 == s2 and the line
/// defines v reading u. Pure filter; facts are never rewritten.
std::vector<OrderVerdictedFact> validate_order(const std::vector<DataFlowFact>& facts,
                                               const FunctionRecord& function,
                                               const PathRecord& path);

struct PathValidation {
    std::optional<PathRecord> record;    // cleaned record; empty when the path itself is rejected
    std::vector<std::string> rejections; // one line per dropped fact/escape/path
};

/// Full pre-storage screen for one analysis path: the statement sequence
/// must be consistent with some syntactic path, every fact must pass
/// validate_order, and fact endpoints must lie on listed statements (or be
/// same-line definitions on one).
PathValidation validate_path_record(const FunctionRecord& function, PathRecord record);

struct FeasibilityVerdict {
    std::string candidate_id;
    Feasibility verdict = Feasibility::Feasible;
    std::string explanation;
    std::string model_response_id;
};

/// Cross-function path-feasibility screen: prompts the model with the
/// candidate's per-segment path conditions and parses the verdict token.
/// Unparseable verdicts default to Feasible with a warning (fail-open).
/// BackendUnreachable propagates.
FeasibilityVerdict validate_feasibility(const BugCandidate& candidate,
                                        const FunctionInventory& inventory, Gateway& gateway,
                                        const DecodingConfig& decoding = {},
                                        DiagnosticLog* diag = nullptr);

} // namespace flowaudit
