#pragma once

#include <string>
#include <vector>

#include "flowaudit/types.hpp"

namespace flowaudit {

enum class BugKind { NullDereference, MemoryLeak, UseAfterFree };

enum class ReportRule { ReportIfSinkReached, ReportIfNoSinkReached };

/// Per-bug-type specification: what counts as a source, what counts as a
/// sink, and whether reaching a sink is the bug or the absence of one is.
struct BugTypeSpec {
    BugKind kind = BugKind::NullDereference;
    ReportRule report_rule = ReportRule::ReportIfSinkReached;
    std::string name; // "npd", "mlk", "uaf"
    std::string source_description;
    std::string sink_description;
    std::vector<std::string> null_literals; // NPD sources
    std::vector<std::string> alloc_apis;    // MLK sources
    std::vector<std::string> dealloc_apis;  // MLK sinks, UAF sources/sinks
    std::string few_shot;                   // examples block for the analysis prompt
};

BugTypeSpec default_bug_spec(BugKind kind);
BugKind parse_bug_kind(const std::string& name); // throws UnsupportedBugType
const char* bug_kind_name(BugKind kind);

/// Applies a bug-type configuration document (JSON text; see README schema)
/// on top of the defaults: per-type allocation/deallocation API lists and
/// null literal spellings. Throws ConfigInvalid on malformed input.
void apply_bug_config(std::vector<BugTypeSpec>& specs, const std::string& config_json);

/// Pattern matchers over the inventory. Pure; deterministic (file, line,
/// column) order. NPD: null-literal assignments. MLK: assignments from a
/// configured allocation API. UAF: pointer arguments of deallocation calls.
std::vector<ProgramValue> find_sources(const FunctionInventory& inventory, const BugTypeSpec& bug);

/// NPD: dereference occurrences (unary *, ->, subscript base). MLK:
/// deallocation-call arguments. UAF: both.
std::vector<ProgramValue> find_sinks(const FunctionInventory& inventory, const BugTypeSpec& bug);

} // namespace flowaudit
