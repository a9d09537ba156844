#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace flowaudit {

/// A position in an indexed source file. Lines and columns are 1-based;
/// column 0 means "unknown" (line-level precision).
struct SourceLocation {
    std::string file;
    int line = 0;
    int column = 0;

    friend bool operator==(const SourceLocation& a, const SourceLocation& b) {
        return a.file == b.file && a.line == b.line && a.column == b.column;
    }
    friend bool operator<(const SourceLocation& a, const SourceLocation& b) {
        return std::tie(a.file, a.line, a.column) < std::tie(b.file, b.line, b.column);
    }
};

std::string to_string(const SourceLocation& loc);

struct Parameter {
    std::string name;
    int index = 0;
    int line = 0; // declaration line within the file
    int column = 0;
};

struct CallSite {
    std::string caller; // FunctionRecord id
    std::string callee_name;
    SourceLocation location;
    std::vector<std::string> arguments; // expression texts, textual order
    std::optional<std::string> receiver_assignment;
};

class FunctionCfg; // built once at index time, immutable afterwards

struct FunctionRecord {
    std::string id; // stable hash of (file, name, start line)
    std::string name;
    std::string file;
    int span_begin = 0; // first line of the definition
    int span_end = 0;   // last line (closing brace)
    std::string source_text;
    std::vector<Parameter> parameters;
    std::vector<CallSite> call_sites;
    std::shared_ptr<const FunctionCfg> cfg;

    bool contains_line(int line) const { return line >= span_begin && line <= span_end; }
    /// Text of an absolute file line inside the span ("" when out of range).
    std::string line_text(int line) const;
};

struct FunctionInventory {
    std::vector<FunctionRecord> functions; // sorted by (file, span_begin)
    std::vector<std::string> files;        // indexed files, sorted

    const FunctionRecord* by_id(const std::string& id) const;
    std::vector<const FunctionRecord*> by_name(const std::string& name) const;
};

struct CallGraphEdge {
    CallSite site;
    std::string callee_id;
};

struct CallGraph {
    std::vector<std::string> nodes; // function ids, sorted
    std::vector<CallGraphEdge> edges;
    std::vector<CallSite> unresolved; // call sites with no in-repo target

    std::vector<const CallGraphEdge*> edges_at(const std::string& caller_id, int line,
                                               const std::string& callee_name) const;
    std::vector<const CallGraphEdge*> edges_to(const std::string& callee_id) const;
};

enum class ValueRole { Source, Sink, Parameter, Argument, ReturnValue, Intermediate };

const char* to_string(ValueRole role);
ValueRole value_role_from_string(const std::string& text);

/// A variable occurrence at a specific statement ("v@s") — the atom all
/// source/sink matching, memory keying, and fact endpoints are built from.
struct ProgramValue {
    std::string variable;
    SourceLocation location;
    std::string function; // FunctionRecord id
    ValueRole role = ValueRole::Intermediate;

    friend bool operator==(const ProgramValue& a, const ProgramValue& b) {
        return a.variable == b.variable && a.location == b.location &&
               a.function == b.function && a.role == b.role;
    }
    friend bool operator<(const ProgramValue& a, const ProgramValue& b) {
        return std::tie(a.function, a.location, a.variable, a.role) <
               std::tie(b.function, b.location, b.variable, b.role);
    }
};

/// Canonical key text for a value, used for memory keying, mock fingerprints
/// and the per-source ledger breakdown.
std::string value_key(const ProgramValue& value);

std::uint64_t fnv1a64(const std::string& text);
std::string hex16(std::uint64_t v);

} // namespace flowaudit
