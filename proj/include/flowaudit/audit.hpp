#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowaudit/bugspec.hpp"
#include "flowaudit/candidate.hpp"
#include "flowaudit/diag.hpp"
#include "flowaudit/gateway.hpp"
#include "flowaudit/ledger.hpp"

#include "json.hpp"

namespace flowaudit {

enum class OutputFormat { Json, Sarif, Text };

OutputFormat output_format_from_string(const std::string& name); // throws ConfigInvalid

struct AuditConfig {
    std::filesystem::path repo_root;
    std::vector<BugKind> bug_types = {BugKind::NullDereference};
    int max_depth = 4; // K
    bool no_abstraction = false;
    bool no_validators = false;
    bool no_cache = false;
    OutputFormat format = OutputFormat::Json;
    int parallel_sources = 4;
    int parallel_requests = 4;
    DecodingConfig decoding;
    RatesConfig rates;
    std::optional<std::filesystem::path> mock_dir; // scripted backend when set
    HttpBackendConfig http;                        // live backend otherwise
    std::optional<std::filesystem::path> few_shot_dir;
    std::optional<std::string> bug_config_json; // bug-type API list overrides
};

/// One validated finding, ready for emission.
struct BugReport {
    BugCandidate candidate;
    std::string bug_name;
};

struct FunctionRef {
    std::string name;
    std::string file;
};

struct AuditResult {
    std::vector<BugReport> reports;
    std::shared_ptr<RunLedger> ledger;
    nlohmann::json memory_dump;
    std::string inventory_dump;
    std::vector<Diagnostic> diagnostics;
    std::map<std::string, FunctionRef> function_index; // id -> (name, file)
};

/// End-to-end pipeline: index -> call graph -> sources -> parallel explore
/// -> validate -> assemble. Partial failures degrade and are logged; throws
/// only ConfigInvalid, RootNotFound, NoSupportedFiles, or
/// BackendUnreachable (the latter only when every query failed).
AuditResult run_audit(const AuditConfig& config, DiagnosticLog* diag = nullptr);

/// Emission-time re-check of a candidate's chain: consecutive facts must
/// share their endpoint value, every location must resolve against the
/// inventory, and each boundary fact must correspond to a call-graph edge
/// (argument position or return-to-receiver). Fills `why` on failure.
bool emission_chain_check(const BugCandidate& candidate, const FunctionInventory& inventory,
                          const CallGraph& graph, std::string* why = nullptr);

/// Canonical machine output. Schema-versioned; deterministic modulo the
/// generated_at timestamp (omitted when with_timestamp is false).
std::string emit_report_json(const AuditResult& result, bool with_timestamp = true);

/// SARIF 2.1.0; one result per report with the fact chain as a code flow.
std::string emit_report_sarif(const AuditResult& result);

/// Human-readable listing ordered by (file, line).
std::string emit_report_text(const AuditResult& result);

std::string emit_report(const AuditResult& result, OutputFormat format);

/// Writes `text` to `path` ("-" = stdout). Throws UnwritableOutput.
void write_output(const std::string& text, const std::string& path);

} // namespace flowaudit
