#include <sstream>

#include "flowaudit/errors.hpp"
#include "flowaudit/frontend.hpp"
#include "flowaudit/gateway.hpp"

namespace flowaudit {

const char* to_string(PromptTemplate t) {
    switch (t) {
    case PromptTemplate::FunctionAnalysis: return "analysis";
    case PromptTemplate::FeasibilityValidation: return "feasibility";
    }
    return "analysis";
}

const char* to_string(Feasibility f) {
    switch (f) {
    case Feasibility::Pending: return "pending";
    case Feasibility::Feasible: return "feasible";
    case Feasibility::Contradiction: return "contradiction";
    case Feasibility::Skipped: return "skipped";
    }
    return "pending";
}

std::string request_fingerprint(PromptTemplate template_kind, const std::string& function_id,
                                const std::string& val_key) {
    return hex16(fnv1a64(std::string(to_string(template_kind)) + "|" + function_id + "|" + val_key));
}

namespace {

const char* bug_long_name(BugKind kind) {
    switch (kind) {
    case BugKind::NullDereference: return "null pointer dereference";
    case BugKind::MemoryLeak: return "memory leak";
    case BugKind::UseAfterFree: return "use after free";
    }
    return "null pointer dereference";
}

std::string numbered_listing(const FunctionRecord& fn) {
    std::ostringstream os;
    int line = fn.span_begin;
    std::size_t pos = 0;
    const std::string& text = fn.source_text;
    while (pos <= text.size() && line <= fn.span_end) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos)
            end = text.size();
        os << line << " | " << text.substr(pos, end - pos) << "\n";
        pos = end + 1;
        ++line;
        if (end == text.size())
            break;
    }
    return os.str();
}

std::string tracked_value_phrase(const FunctionRecord& fn, const ProgramValue& value) {
    std::ostringstream os;
    auto target = assignment_target_at_line(fn, value.location.line);
    if (target && *target != value.variable)
        os << "the value " << value.variable << " assigned to " << *target << " at line "
           << value.location.line;
    else
        os << "the value " << value.variable << " at line " << value.location.line;
    return os.str();
}

const char* kFormatContract =
    "Answer with one block per feasible path and nothing else:\n"
    "PATH <number>\n"
    "STMT <line>\n"
    "FACT <var>@<line> -> <var>@<line>\n"
    "ESCAPE RETURN <var>@<line>\n"
    "ESCAPE ARG <var>@<line> CALLEE <function-name> INDEX <0-based-argument-position>\n"
    "ESCAPE GLOBAL <var>@<line>\n"
    "COND <single-line summary of the path's branch conditions>\n"
    "END\n"
    "List one STMT line per statement on the path in execution order, then the FACT lines, then\n"
    "any ESCAPE lines, then one COND line. Use absolute line numbers from the listing above.\n"
    "Emit ESCAPE lines only where the tracked value actually leaves the function.\n";

} // namespace

PromptRequest render_analysis_prompt(const FunctionRecord& function, const ProgramValue& value,
                                     const BugTypeSpec& bug, const std::string& few_shots,
                                     const RenderOptions& options, const DecodingConfig& decoding) {
    if (value.function != function.id || !function.contains_line(value.location.line))
        throw ValueOutsideFunction(value.variable + "@" + to_string(value.location) + " vs " +
                                   function.name);

    std::ostringstream os;
    os << "You are auditing C source code for " << bug_long_name(bug.kind) << " bugs: "
       << bug.source_description << " flowing to " << bug.sink_description << ".\n"
       << "Track how " << tracked_value_phrase(function, value)
       << " propagates along feasible execution paths inside the function below.\n\n"
       << "Function " << function.name << " (" << function.file << ", lines " << function.span_begin
       << "-" << function.span_end << "):\n"
       << numbered_listing(function) << "\n"
       << "Work through these steps in order.\n\n"
       << "Step 1 (pointer reasoning): for each pointer involved with the tracked value, determine "
          "which memory it can refer to at each statement, following assignments, address-of and "
          "dereference operations.\n\n";
    if (options.include_abstraction_step)
        os << "Step 2 (program abstraction): narrow the function to the statements that matter for "
              "the tracked value: assignments that propagate it directly or indirectly, the "
              "conditional checks guarding those assignments, and the calls, returns or global "
              "writes through which it can leave the function. Ignore every other statement.\n\n";
    os << "Step 3 (feasible path exploration): enumerate the distinct execution paths through the "
          "statements that matter. Discard any path whose branch conditions contradict each other. "
          "For each remaining feasible path, collect the data-flow facts that hold along it.\n\n"
       << "Examples:\n"
       << few_shots << "\n"
       << "Question: starting from " << tracked_value_phrase(function, value) << " of "
       << function.name << ", report every feasible program path and the data-flow facts along "
          "each path.\n\n"
       << kFormatContract;

    PromptRequest request;
    request.template_kind = PromptTemplate::FunctionAnalysis;
    request.rendered_text = os.str();
    request.decoding = decoding;
    request.fingerprint =
        request_fingerprint(PromptTemplate::FunctionAnalysis, function.id, value_key(value));
    return request;
}

PromptRequest render_feasibility_prompt(const BugCandidate& candidate,
                                        const FunctionInventory& inventory,
                                        const DecodingConfig& decoding) {
    if (candidate.segments.empty())
        throw EmptyCandidate();

    std::ostringstream os;
    os << "You are validating a candidate " << bug_long_name(candidate.bug)
       << " report assembled from per-function analyses of a C codebase.\n"
       << "The candidate chains these data-flow facts:\n";
    int i = 1;
    for (const auto& fact : candidate.chain) {
        os << "  " << i++ << ". " << fact.src.variable << "@" << fact.src.location.line << " -> "
           << fact.dst.variable << "@" << fact.dst.location.line
           << (fact.boundary ? " (across a function boundary)" : "") << "\n";
    }
    if (candidate.chain.empty())
        os << "  (the tracked value does not propagate on this path)\n";
    os << "\nThe inter-procedural path passes through these function segments in order:\n\n";
    int k = 1;
    for (const auto& segment : candidate.segments) {
        const FunctionRecord* fn = inventory.by_id(segment.function);
        os << "Segment " << k++ << ": function " << (fn ? fn->name : segment.function);
        if (fn)
            os << " (" << fn->file << ")";
        os << "\n  path statements: ";
        for (std::size_t s = 0; s < segment.path.statements.size(); ++s)
            os << (s ? ", " : "") << "line " << segment.path.statements[s].line;
        os << "\n  path conditions: "
           << (segment.path.condition_notes.empty() ? "(none recorded)"
                                                    : segment.path.condition_notes)
           << "\n\n";
    }
    os << "Can the recorded path conditions of all segments hold in one single execution? If two "
          "conditions contradict each other, the inter-procedural path is infeasible.\n\n"
       << "Answer on the first line with exactly one verdict token: FEASIBLE or CONTRADICTION. "
          "Then give a brief justification.\n";

    PromptRequest request;
    request.template_kind = PromptTemplate::FeasibilityValidation;
    request.rendered_text = os.str();
    request.decoding = decoding;
    const std::string source_val_key = value_key(candidate.source);
    request.fingerprint = request_fingerprint(PromptTemplate::FeasibilityValidation,
                                              candidate.source.function, source_val_key);
    request.detail_fingerprint =
        request_fingerprint(PromptTemplate::FeasibilityValidation, candidate.source.function,
                            source_val_key + "#" + chain_signature(candidate));
    return request;
}

std::string chain_signature(const BugCandidate& candidate) {
    std::ostringstream os;
    for (const auto& fact : candidate.chain)
        os << fact.src.variable << "@" << fact.src.location.file << ":" << fact.src.location.line
           << (fact.boundary ? "=>" : "->") << fact.dst.variable << "@" << fact.dst.location.file
           << ":" << fact.dst.location.line << ";";
    return hex16(fnv1a64(os.str()));
}

} // namespace flowaudit
