#include <algorithm>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flowaudit/audit.hpp"
#include "flowaudit/errors.hpp"
#include "flowaudit/memory.hpp"

namespace flowaudit {

namespace {

constexpr const char* kToolName = "flowaudit";
constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kReportSchemaVersion = "1.0";

std::string iso_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

const char* terminal_name(TerminalKind kind) {
    return kind == TerminalKind::SinkReached ? "sink_reached" : "no_sink_on_path";
}

FunctionRef resolve(const AuditResult& result, const std::string& function_id) {
    auto it = result.function_index.find(function_id);
    if (it != result.function_index.end())
        return it->second;
    return {function_id, ""};
}

nlohmann::json report_to_json(const AuditResult& result, const BugReport& report) {
    const BugCandidate& candidate = report.candidate;
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& fact : candidate.chain)
        chain.push_back(to_json(fact));
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& segment : candidate.segments) {
        const FunctionRef ref = resolve(result, segment.function);
        nlohmann::json statements = nlohmann::json::array();
        for (const auto& s : segment.path.statements)
            statements.push_back(to_json(s));
        segments.push_back({{"function", segment.function},
                            {"function_name", ref.name},
                            {"file", ref.file},
                            {"path_id", segment.path.path_id},
                            {"statements", std::move(statements)},
                            {"condition_notes", segment.path.condition_notes}});
    }
    return {{"id", candidate.id},
            {"bug_type", report.bug_name},
            {"source", to_json(candidate.source)},
            {"sink", candidate.sink ? to_json(*candidate.sink) : nlohmann::json()},
            {"terminal", terminal_name(candidate.terminal)},
            {"chain", std::move(chain)},
            {"segments", std::move(segments)},
            {"order_validated", candidate.order_validated},
            {"feasibility", to_string(candidate.feasibility)},
            {"feasibility_note", candidate.feasibility_note},
            {"inconclusive",
             {{"global_escape", candidate.global_escape},
              {"depth_truncated", candidate.depth_truncated}}}};
}

std::string describe(const AuditResult& result, const BugReport& report) {
    const BugCandidate& c = report.candidate;
    const FunctionRef source_fn = resolve(result, c.source.function);
    std::ostringstream os;
    if (c.terminal == TerminalKind::SinkReached && c.sink) {
        os << c.source.variable << " from " << source_fn.name << ":" << c.source.location.line
           << " reaches " << c.sink->variable << " at " << to_string(c.sink->location);
    } else {
        os << "allocation " << c.source.variable << " at " << to_string(c.source.location)
           << " is not released on path " << (c.segments.empty() ? "?" : c.segments.back().path.path_id);
    }
    return os.str();
}

} // namespace

OutputFormat output_format_from_string(const std::string& name) {
    if (name == "json")
        return OutputFormat::Json;
    if (name == "sarif")
        return OutputFormat::Sarif;
    if (name == "text")
        return OutputFormat::Text;
    throw ConfigInvalid("unknown output format: " + name);
}

std::string emit_report_json(const AuditResult& result, bool with_timestamp) {
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& report : result.reports)
        reports.push_back(report_to_json(result, report));
    nlohmann::json doc = {
        {"schema_version", kReportSchemaVersion},
        {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
        {"reports", std::move(reports)},
        {"diagnostics",
         {{"warnings", std::count_if(result.diagnostics.begin(), result.diagnostics.end(),
                                     [](const Diagnostic& d) {
                                         return d.severity == Severity::Warning;
                                     })},
          {"errors", std::count_if(result.diagnostics.begin(), result.diagnostics.end(),
                                   [](const Diagnostic& d) {
                                       return d.severity == Severity::Error;
                                   })}}},
    };
    if (with_timestamp)
        doc["generated_at"] = iso_utc_now();
    return doc.dump(2) + "\n";
}

std::string emit_report_sarif(const AuditResult& result) {
    nlohmann::json rules = nlohmann::json::array();
    rules.push_back({{"id", "npd"},
                     {"name", "NullPointerDereference"},
                     {"shortDescription", {{"text", "A null value reaches a pointer dereference"}}}});
    rules.push_back({{"id", "mlk"},
                     {"name", "MemoryLeak"},
                     {"shortDescription",
                      {{"text", "Allocated memory is not released on some feasible path"}}}});
    rules.push_back({{"id", "uaf"},
                     {"name", "UseAfterFree"},
                     {"shortDescription",
                      {{"text", "A freed pointer is dereferenced or freed again"}}}});

    auto location_json = [&](const SourceLocation& loc, const std::string& message) {
        nlohmann::json physical = {{"artifactLocation", {{"uri", loc.file}}},
                                   {"region", {{"startLine", loc.line > 0 ? loc.line : 1}}}};
        if (loc.column > 0)
            physical["region"]["startColumn"] = loc.column;
        nlohmann::json out = {{"physicalLocation", std::move(physical)}};
        if (!message.empty())
            out["message"] = {{"text", message}};
        return out;
    };

    nlohmann::json results = nlohmann::json::array();
    for (const auto& report : result.reports) {
        const BugCandidate& c = report.candidate;
        const SourceLocation& primary =
            c.terminal == TerminalKind::SinkReached && c.sink ? c.sink->location
                                                              : c.source.location;
        nlohmann::json flow_locations = nlohmann::json::array();
        if (c.chain.empty()) {
            flow_locations.push_back(
                {{"location", location_json(c.source.location, c.source.variable)}});
        } else {
            for (const auto& fact : c.chain)
                flow_locations.push_back(
                    {{"location",
                      location_json(fact.dst.location,
                                    fact.src.variable + "@" +
                                        std::to_string(fact.src.location.line) + " -> " +
                                        fact.dst.variable + "@" +
                                        std::to_string(fact.dst.location.line))}});
        }
        results.push_back(
            {{"ruleId", report.bug_name},
             {"level", "warning"},
             {"message", {{"text", describe(result, report)}}},
             {"locations", nlohmann::json::array({location_json(primary, "")})},
             {"codeFlows",
              nlohmann::json::array(
                  {{{"threadFlows",
                     nlohmann::json::array({{{"locations", std::move(flow_locations)}}})}}})}});
    }

    nlohmann::json doc = {
        {"$schema",
         "https://raw.githubusercontent.com/oasis-tcs/sarif-spec/master/Schemata/"
         "sarif-schema-2.1.0.json"},
        {"version", "2.1.0"},
        {"runs",
         nlohmann::json::array(
             {{{"tool",
                {{"driver",
                  {{"name", kToolName},
                   {"version", kToolVersion},
                   {"informationUri", "https://example.invalid/flowaudit"},
                   {"rules", std::move(rules)}}}}},
               {"results", std::move(results)}}})},
    };
    return doc.dump(2) + "\n";
}

std::string emit_report_text(const AuditResult& result) {
    std::vector<const BugReport*> ordered;
    for (const auto& report : result.reports)
        ordered.push_back(&report);
    std::sort(ordered.begin(), ordered.end(), [](const BugReport* a, const BugReport* b) {
        const SourceLocation& la = a->candidate.source.location;
        const SourceLocation& lb = b->candidate.source.location;
        return std::tie(la, a->candidate.id) < std::tie(lb, b->candidate.id);
    });
    std::ostringstream os;
    if (ordered.empty()) {
        os << "no findings\n";
        return os.str();
    }
    for (const BugReport* report : ordered) {
        const BugCandidate& c = report->candidate;
        std::string upper = report->bug_name;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
        os << to_string(c.source.location) << ": [" << upper << "] " << describe(result, *report)
           << " (" << to_string(c.feasibility) << ")\n";
        for (const auto& fact : c.chain)
            os << "    " << fact.src.variable << "@" << to_string(fact.src.location) << " -> "
               << fact.dst.variable << "@" << to_string(fact.dst.location)
               << (fact.boundary ? "  [boundary]" : "") << "\n";
        for (const auto& segment : c.segments) {
            const FunctionRef ref = resolve(result, segment.function);
            os << "    path " << segment.path.path_id << " in " << ref.name << " (lines";
            for (const auto& s : segment.path.statements)
                os << " " << s.line;
            os << ")";
            if (!segment.path.condition_notes.empty())
                os << " when " << segment.path.condition_notes;
            os << "\n";
        }
        if (c.global_escape)
            os << "    note: value also escapes to a global; report may be incomplete\n";
        if (c.depth_truncated)
            os << "    note: exploration truncated at the depth bound\n";
    }
    return os.str();
}

std::string emit_report(const AuditResult& result, OutputFormat format) {
    switch (format) {
    case OutputFormat::Json: return emit_report_json(result);
    case OutputFormat::Sarif: return emit_report_sarif(result);
    case OutputFormat::Text: return emit_report_text(result);
    }
    return emit_report_json(result);
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!std::cout)
            throw UnwritableOutput("stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UnwritableOutput(path);
    out << text;
    if (!out)
        throw UnwritableOutput(path);
}

} // namespace flowaudit
