#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowaudit/candidate.hpp"
#include "flowaudit/diag.hpp"
#include "flowaudit/ledger.hpp"
#include "flowaudit/memory.hpp"
#include "flowaudit/types.hpp"

namespace flowaudit {

enum class PromptTemplate { FunctionAnalysis, FeasibilityValidation };

const char* to_string(PromptTemplate t);

struct DecodingConfig {
    double temperature = 0.0; // decoding default per the tool's configuration
    int max_output_tokens = 4096;
};

struct PromptRequest {
    PromptTemplate template_kind = PromptTemplate::FunctionAnalysis;
    std::string rendered_text;
    DecodingConfig decoding;
    std::string fingerprint;          // hash of (template kind, function id, value key)
    std::string detail_fingerprint;   // feasibility only: additionally chain-qualified
};

struct ModelResponse {
    std::string raw_text;
    long input_tokens = 0;
    long output_tokens = 0;
    double latency_seconds = 0.0;
    std::string backend_id;
};

struct AnalysisParse {
    std::vector<PathRecord> paths;
    std::vector<std::string> parse_errors;
};

struct RenderOptions {
    bool include_abstraction_step = true; // step 2; the --no-abstraction switch clears it
};

std::string request_fingerprint(PromptTemplate template_kind, const std::string& function_id,
                                const std::string& val_key);

/// Renders the per-function analysis prompt: task description, the three
/// step hints (pointer handling, program abstraction, feasible-path
/// exploration), few-shot examples, the question naming the tracked value,
/// and the output-format contract. Deterministic. Throws
/// ValueOutsideFunction.
PromptRequest render_analysis_prompt(const FunctionRecord& function, const ProgramValue& value,
                                     const BugTypeSpec& bug, const std::string& few_shots,
                                     const RenderOptions& options = {},
                                     const DecodingConfig& decoding = {});

/// Renders the cross-function path-feasibility prompt: every segment's path
/// statements, facts and condition notes, then a request for a single
/// verdict token (FEASIBLE / CONTRADICTION) plus justification. Throws
/// EmptyCandidate.
PromptRequest render_feasibility_prompt(const BugCandidate& candidate,
                                        const FunctionInventory& inventory,
                                        const DecodingConfig& decoding = {});

/// Extracts PATH blocks from a model response into PathRecords. Total:
/// malformed content becomes parse_errors, never an exception. Facts whose
/// endpoints fall outside the function, or whose variables do not occur on
/// the named line, are dropped and recorded.
AnalysisParse parse_analysis_response(const std::string& raw, const FunctionRecord& function,
                                      bool strict = false);

struct FeasibilityParse {
    Feasibility verdict = Feasibility::Feasible;
    std::string explanation;
    bool parsed = false; // false => verdict defaulted (fail-open)
};

FeasibilityParse parse_feasibility_response(const std::string& raw);

/// A model transport. Implementations must be safe for concurrent complete()
/// calls.
class Backend {
public:
    virtual ~Backend() = default;
    virtual ModelResponse complete(const PromptRequest& request) = 0;
    virtual std::string id() const = 0;
};

/// Deterministic scripted backend: resolves each request against
/// `<dir>/<fingerprint>.json` ({"raw_text", "input_tokens", "output_tokens",
/// "latency_seconds"}). Fails loudly (MockResponseMissing) on an unmatched
/// fingerprint.
class MockBackend : public Backend {
public:
    explicit MockBackend(std::filesystem::path dir);
    ModelResponse complete(const PromptRequest& request) override;
    std::string id() const override { return "mock"; }

    /// Writes a scripted response file; shared by tests and fixtures.
    static void script(const std::filesystem::path& dir, const std::string& fingerprint,
                       const std::string& raw_text, long input_tokens, long output_tokens,
                       double latency_seconds = 0.0);

private:
    std::filesystem::path dir_;
};

struct HttpBackendConfig {
    std::string endpoint;       // full URL of the chat-completion route
    std::string provider = "openai"; // request/response schema adapter
    std::string model;
    std::string api_key;        // resolved from the environment by the CLI
    int timeout_seconds = 120;
};

/// Thin, data-driven adapter over an HTTP chat-completion endpoint.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    ModelResponse complete(const PromptRequest& request) override;
    std::string id() const override;

private:
    HttpBackendConfig config_;
};

struct GatewayOptions {
    int parallel_requests = 4; // in-flight query budget
    int transport_retries = 3;
    double backoff_seconds = 0.1;
};

/// The query front door: bounded in-flight concurrency, transport retries
/// with exponential backoff, and exact ledger accounting (one entry per
/// response).
class Gateway {
public:
    Gateway(Backend& backend, RunLedger& ledger, GatewayOptions options = {},
            DiagnosticLog* diag = nullptr);

    /// Throws BackendUnreachable after the retry budget, MockResponseMissing
    /// for unscripted mock fingerprints, OutputTruncated when the response
    /// hit the output-token cap.
    ModelResponse query(const PromptRequest& request, QueryClass query_class,
                        const std::string& source_key);

    RunLedger& ledger() { return ledger_; }

private:
    Backend& backend_;
    RunLedger& ledger_;
    GatewayOptions options_;
    DiagnosticLog* diag_;
    class Slots;
    std::shared_ptr<Slots> slots_;
};

} // namespace flowaudit
