#pragma once

// Shared fixture repositories and scripted mock responses. The expected
// values asserted against these fixtures (fact chains, path counts, fact
// multiplicities) are frozen from hand-walked oracles; the helpers here
// only wire fixture text and response scripts together.

#include <sstream>
#include <stdexcept>
#include <string>

#include "flowaudit/bugspec.hpp"
#include "flowaudit/frontend.hpp"
#include "flowaudit/gateway.hpp"
#include "flowaudit/types.hpp"

#include "support/temp_dir.hpp"

namespace testsupport {

using namespace flowaudit;

// --- the two-file null-dereference fixture -------------------------------
// field2json assigns NULL at line 4; on the !repeated path the null value
// reaches the return at line 14; parse_msg receives it at line 7 and
// dereferences at line 8.

inline const char* kField2JsonSource = R"(#include "pbjson.h"

json_t *field2json(const message_t *msg, int repeated) {
    json_t *json = NULL;
    if (repeated) {
        json = json_new_array();
    }
    switch (msg->field_type) {
    case FIELD_TYPE_INT32:
        json_read_int(json, msg);
        break;
    }
    if (!repeated) {
        return json;
    }
    return json_wrap(json);
}
)";

inline const char* kParseMsgSource = R"(#include "pbjson.h"

int parse_msg(message_t *msg) {
    if (msg == NULL) {
        return -1;
    }
    json_t *field_json = field2json(msg, 0);
    json_set_parent(field_json->root, msg);
    return 0;
}
)";

inline void write_fig2_repo(const TempDir& dir) {
    dir.write("field2json.c", kField2JsonSource);
    dir.write("parse_msg.c", kParseMsgSource);
}

inline const FunctionRecord& fn_by_name(const FunctionInventory& inventory,
                                        const std::string& name) {
    auto matches = inventory.by_name(name);
    if (matches.size() != 1)
        throw std::runtime_error("fixture: expected exactly one function named " + name);
    return *matches.front();
}

inline ProgramValue source_by_line(const std::vector<ProgramValue>& sources, int line) {
    for (const auto& s : sources)
        if (s.location.line == line)
            return s;
    throw std::runtime_error("fixture: no source at line " + std::to_string(line));
}

/// The value the explorer tracks in a caller after a return-value boundary
/// hop: the receiver variable at the call-site line.
inline ProgramValue receiver_value(const FunctionInventory& inventory,
                                   const std::string& caller_name, int call_line,
                                   const std::string& receiver) {
    const FunctionRecord& caller = fn_by_name(inventory, caller_name);
    return {receiver, {caller.file, call_line, 0}, caller.id, ValueRole::Intermediate};
}

/// The value tracked in a callee after an argument boundary hop: the
/// parameter at its declaration location.
inline ProgramValue parameter_value(const FunctionInventory& inventory,
                                    const std::string& callee_name, int index) {
    const FunctionRecord& callee = fn_by_name(inventory, callee_name);
    const Parameter& param = callee.parameters.at(static_cast<std::size_t>(index));
    return {param.name,
            {callee.file, param.line > 0 ? param.line : callee.span_begin, param.column},
            callee.id,
            ValueRole::Parameter};
}

inline void script_analysis(const std::filesystem::path& mock_dir, const FunctionRecord& fn,
                            const ProgramValue& value, const std::string& response,
                            long input_tokens = 100, long output_tokens = 10) {
    MockBackend::script(mock_dir,
                        request_fingerprint(PromptTemplate::FunctionAnalysis, fn.id,
                                            value_key(value)),
                        response, input_tokens, output_tokens);
}

inline void script_feasibility(const std::filesystem::path& mock_dir, const ProgramValue& source,
                               const std::string& response, long input_tokens = 100,
                               long output_tokens = 10) {
    MockBackend::script(mock_dir,
                        request_fingerprint(PromptTemplate::FeasibilityValidation, source.function,
                                            value_key(source)),
                        response, input_tokens, output_tokens);
}

inline const char* kField2JsonAnalysisResponse =
    "PATH 1\n"
    "STMT 4\nSTMT 5\nSTMT 13\nSTMT 14\n"
    "FACT NULL@4 -> json@4\n"
    "FACT json@4 -> json@14\n"
    "ESCAPE RETURN json@14\n"
    "COND repeated == false\n"
    "END\n"
    "PATH 2\n"
    "STMT 4\nSTMT 5\nSTMT 6\nSTMT 8\nSTMT 9\nSTMT 10\nSTMT 13\nSTMT 16\n"
    "FACT NULL@4 -> json@4\n"
    "COND repeated == true; field type is FIELD_TYPE_INT32\n"
    "END\n"
    "PATH 3\n"
    "STMT 4\nSTMT 5\nSTMT 6\nSTMT 8\nSTMT 13\nSTMT 16\n"
    "FACT NULL@4 -> json@4\n"
    "COND repeated == true; field type is not FIELD_TYPE_INT32\n"
    "END\n";

inline const char* kParseMsgAnalysisResponse =
    "PATH 1\n"
    "STMT 7\nSTMT 8\nSTMT 9\n"
    "FACT field_json@7 -> field_json@8\n"
    "COND msg != NULL\n"
    "END\n";

/// Scripts the standard NPD run over the fig2 repo: two analyses plus one
/// feasibility verdict. Token counts follow the (100,10)/(200,20)/(300,30)
/// ledger example.
inline void script_fig2_npd(const std::filesystem::path& mock_dir,
                            const FunctionInventory& inventory,
                            const std::string& feasibility_response = "FEASIBLE\nThe conditions "
                                                                      "agree on repeated == false.") {
    const FunctionRecord& f2j = fn_by_name(inventory, "field2json");
    const FunctionRecord& pm = fn_by_name(inventory, "parse_msg");
    const BugTypeSpec npd = default_bug_spec(BugKind::NullDereference);
    const ProgramValue source = source_by_line(find_sources(inventory, npd), 4);
    script_analysis(mock_dir, f2j, source, kField2JsonAnalysisResponse, 100, 10);
    script_analysis(mock_dir, pm, receiver_value(inventory, "parse_msg", 7, "field_json"),
                    kParseMsgAnalysisResponse, 200, 20);
    script_feasibility(mock_dir, source, feasibility_response, 300, 30);
}

// --- six-function forwarding chain (depth-bound fixture) ------------------

inline const char* kChain6Source = R"(void sink6(int *p6) {
    consume(*p6);
}

void hop5(int *p5) {
    sink6(p5);
}

void hop4(int *p4) {
    hop5(p4);
}

void hop3(int *p3) {
    hop4(p3);
}

void hop2(int *p2) {
    hop3(p2);
}

void start1(void) {
    int *p1 = NULL;
    hop2(p1);
}
)";

inline void write_chain6_repo(const TempDir& dir) { dir.write("chain.c", kChain6Source); }

inline std::string forward_response(const std::string& param, int decl_line, int call_line,
                                    const std::string& callee) {
    std::ostringstream os;
    os << "PATH 1\n"
       << "STMT " << decl_line << "\nSTMT " << call_line << "\n"
       << "FACT " << param << "@" << decl_line << " -> " << param << "@" << call_line << "\n"
       << "ESCAPE ARG " << param << "@" << call_line << " CALLEE " << callee << " INDEX 0\n"
       << "COND unconditional\n"
       << "END\n";
    return os.str();
}

inline void script_chain6_npd(const std::filesystem::path& mock_dir,
                              const FunctionInventory& inventory) {
    const BugTypeSpec npd = default_bug_spec(BugKind::NullDereference);
    const ProgramValue source = source_by_line(find_sources(inventory, npd), 22);

    script_analysis(mock_dir, fn_by_name(inventory, "start1"), source,
                    "PATH 1\nSTMT 22\nSTMT 23\n"
                    "FACT NULL@22 -> p1@22\nFACT p1@22 -> p1@23\n"
                    "ESCAPE ARG p1@23 CALLEE hop2 INDEX 0\nCOND unconditional\nEND\n");
    script_analysis(mock_dir, fn_by_name(inventory, "hop2"),
                    parameter_value(inventory, "hop2", 0), forward_response("p2", 17, 18, "hop3"));
    script_analysis(mock_dir, fn_by_name(inventory, "hop3"),
                    parameter_value(inventory, "hop3", 0), forward_response("p3", 13, 14, "hop4"));
    script_analysis(mock_dir, fn_by_name(inventory, "hop4"),
                    parameter_value(inventory, "hop4", 0), forward_response("p4", 9, 10, "hop5"));
    script_analysis(mock_dir, fn_by_name(inventory, "hop5"),
                    parameter_value(inventory, "hop5", 0), forward_response("p5", 5, 6, "sink6"));
    script_analysis(mock_dir, fn_by_name(inventory, "sink6"),
                    parameter_value(inventory, "sink6", 0),
                    "PATH 1\nSTMT 1\nSTMT 2\nFACT p6@1 -> p6@2\nCOND unconditional\nEND\n");
    script_feasibility(mock_dir, source, "FEASIBLE\nEvery hop is unconditional.");
}

// --- shared-callee fixture (cache accounting) -----------------------------

inline const char* kSharedCalleeSource = R"(void deref_shared(int *p) {
    emit(*p);
}

void caller_a(void) {
    int *x = NULL;
    deref_shared(x);
}

void caller_b(void) {
    int *y = NULL;
    deref_shared(y);
}
)";

inline void write_shared_repo(const TempDir& dir) { dir.write("shared.c", kSharedCalleeSource); }

inline void script_shared_npd(const std::filesystem::path& mock_dir,
                              const FunctionInventory& inventory) {
    const BugTypeSpec npd = default_bug_spec(BugKind::NullDereference);
    const auto sources = find_sources(inventory, npd);
    const ProgramValue src_a = source_by_line(sources, 6);
    const ProgramValue src_b = source_by_line(sources, 11);

    script_analysis(mock_dir, fn_by_name(inventory, "caller_a"), src_a,
                    "PATH 1\nSTMT 6\nSTMT 7\nFACT NULL@6 -> x@6\nFACT x@6 -> x@7\n"
                    "ESCAPE ARG x@7 CALLEE deref_shared INDEX 0\nCOND unconditional\nEND\n");
    script_analysis(mock_dir, fn_by_name(inventory, "caller_b"), src_b,
                    "PATH 1\nSTMT 11\nSTMT 12\nFACT NULL@11 -> y@11\nFACT y@11 -> y@12\n"
                    "ESCAPE ARG y@12 CALLEE deref_shared INDEX 0\nCOND unconditional\nEND\n");
    script_analysis(mock_dir, fn_by_name(inventory, "deref_shared"),
                    parameter_value(inventory, "deref_shared", 0),
                    "PATH 1\nSTMT 1\nSTMT 2\nFACT p@1 -> p@2\nCOND unconditional\nEND\n");
    script_feasibility(mock_dir, src_a, "FEASIBLE\nNo conditions to conflict.");
    script_feasibility(mock_dir, src_b, "FEASIBLE\nNo conditions to conflict.");
}

// --- memory-leak fixtures --------------------------------------------------
// Early-return branch leaks the allocation; the variant frees on all paths.

inline const char* kMlkLeakSource = R"(int setup(int mode) {
    char *buf = malloc(64);
    if (mode < 0) {
        return -1;
    }
    fill(buf);
    free(buf);
    return 0;
}
)";

inline const char* kMlkFreedSource = R"(int setup(int mode) {
    char *buf = malloc(64);
    if (mode < 0) {
        free(buf);
        return -1;
    }
    fill(buf);
    free(buf);
    return 0;
}
)";

inline void script_mlk_leak(const std::filesystem::path& mock_dir,
                            const FunctionInventory& inventory) {
    const BugTypeSpec mlk = default_bug_spec(BugKind::MemoryLeak);
    const ProgramValue source = source_by_line(find_sources(inventory, mlk), 2);
    script_analysis(mock_dir, fn_by_name(inventory, "setup"), source,
                    "PATH 1\nSTMT 2\nSTMT 3\nSTMT 4\nCOND mode < 0\nEND\n"
                    "PATH 2\nSTMT 2\nSTMT 3\nSTMT 6\nSTMT 7\nSTMT 8\n"
                    "FACT buf@2 -> buf@6\nFACT buf@6 -> buf@7\nCOND mode >= 0\nEND\n");
    script_feasibility(mock_dir, source, "FEASIBLE\nmode < 0 is a consistent input.");
}

inline void script_mlk_freed(const std::filesystem::path& mock_dir,
                             const FunctionInventory& inventory) {
    const BugTypeSpec mlk = default_bug_spec(BugKind::MemoryLeak);
    const ProgramValue source = source_by_line(find_sources(inventory, mlk), 2);
    script_analysis(mock_dir, fn_by_name(inventory, "setup"), source,
                    "PATH 1\nSTMT 2\nSTMT 3\nSTMT 4\nSTMT 5\nFACT buf@2 -> buf@4\n"
                    "COND mode < 0\nEND\n"
                    "PATH 2\nSTMT 2\nSTMT 3\nSTMT 7\nSTMT 8\nSTMT 9\n"
                    "FACT buf@2 -> buf@7\nFACT buf@7 -> buf@8\nCOND mode >= 0\nEND\n");
}

} // namespace testsupport
