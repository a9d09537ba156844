#include "flowaudit/validators.hpp"

#include <sstream>

#include "flowaudit/errors.hpp"
#include "flowaudit/frontend.hpp"

namespace flowaudit {

std::vector<OrderVerdictedFact> validate_order(const std::vector<DataFlowFact>& facts,
                                               const FunctionRecord& function,
                                               const PathRecord& path) {
    (void)path; // ordering is a property of the function's CFG, not the listed path
    std::vector<OrderVerdictedFact> out;
    out.reserve(facts.size());
    for (const auto& fact : facts) {
        OrderVerdictedFact verdicted{fact, OrderVerdict::Consistent, {}};
        const SourceLocation& s1 = fact.src.location;
        const SourceLocation& s2 = fact.dst.location;
        if (s1.line == s2.line) {
            if (is_same_line_definition(function, s1.line, fact.dst.variable, fact.src.variable)) {
                out.push_back(std::move(verdicted));
                continue;
            }
            verdicted.verdict = OrderVerdict::Violation;
            verdicted.reason = "line " + std::to_string(s1.line) + " does not define " +
                               fact.dst.variable + " from " + fact.src.variable;
            out.push_back(std::move(verdicted));
            continue;
        }
        const Ordering ordering = statement_precedes(function, s1, s2);
        if (ordering == Ordering::MustPrecede || ordering == Ordering::MayPrecede) {
            out.push_back(std::move(verdicted));
            continue;
        }
        verdicted.verdict = OrderVerdict::Violation;
        std::ostringstream reason;
        reason << "control flow forbids " << to_string(fact) << " (" << to_string(ordering) << ")";
        verdicted.reason = reason.str();
        out.push_back(std::move(verdicted));
    }
    return out;
}

PathValidation validate_path_record(const FunctionRecord& function, PathRecord record) {
    PathValidation out;

    // 1. the statement list must be consistent with some syntactic path
    for (std::size_t i = 0; i + 1 < record.statements.size(); ++i) {
        const SourceLocation& a = record.statements[i];
        const SourceLocation& b = record.statements[i + 1];
        if (a.line == b.line)
            continue;
        const Ordering ordering = statement_precedes(function, a, b);
        if (ordering == Ordering::CannotPrecede || ordering == Ordering::Unknown) {
            out.rejections.push_back(record.path_id + ": statement sequence " +
                                     std::to_string(a.line) + " -> " + std::to_string(b.line) +
                                     " is not a syntactic path (" + to_string(ordering) +
                                     "); path dropped");
            return out;
        }
    }

    // 2. facts must be on listed statements (or same-line definitions on one)
    auto on_path = [&](const SourceLocation& loc) {
        for (const auto& s : record.statements)
            if (s.line == loc.line)
                return true;
        return false;
    };
    std::vector<DataFlowFact> located;
    for (auto& fact : record.facts) {
        if (on_path(fact.src.location) && on_path(fact.dst.location)) {
            located.push_back(std::move(fact));
        } else {
            out.rejections.push_back(record.path_id + ": fact " + to_string(fact) +
                                     " references statements not on the recorded path; dropped");
        }
    }

    // 3. control-flow-order alignment
    std::vector<OrderVerdictedFact> verdicts = validate_order(located, function, record);
    record.facts.clear();
    for (auto& v : verdicts) {
        if (v.verdict == OrderVerdict::Consistent)
            record.facts.push_back(std::move(v.fact));
        else
            out.rejections.push_back(record.path_id + ": " + v.reason);
    }

    record.order_validated = true;
    out.record = std::move(record);
    return out;
}

FeasibilityVerdict validate_feasibility(const BugCandidate& candidate,
                                        const FunctionInventory& inventory, Gateway& gateway,
                                        const DecodingConfig& decoding, DiagnosticLog* diag) {
    PromptRequest request = render_feasibility_prompt(candidate, inventory, decoding);
    ModelResponse response =
        gateway.query(request, QueryClass::Feasibility, value_key(candidate.source));
    FeasibilityParse parse = parse_feasibility_response(response.raw_text);

    FeasibilityVerdict verdict;
    verdict.candidate_id = candidate.id;
    verdict.model_response_id = request.fingerprint;
    verdict.verdict = parse.verdict;
    verdict.explanation = parse.explanation;
    if (!parse.parsed) {
        verdict.verdict = Feasibility::Feasible;
        verdict.explanation = "verdict token missing; defaulted to feasible";
        if (diag)
            diag->warn("validators", "candidate " + candidate.id +
                                         ": unparseable feasibility verdict; kept (fail-open)");
    }
    return verdict;
}

} // namespace flowaudit
