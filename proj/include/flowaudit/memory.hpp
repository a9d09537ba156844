#pragma once

#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flowaudit/types.hpp"

#include "json.hpp"

namespace flowaudit {

/// One propagation step u@s_a -> v@s_b. Facts produced by function analysis
/// are intra-procedural; `boundary` marks the synthetic links the explorer
/// inserts when concatenating chains across a call or return.
struct DataFlowFact {
    ProgramValue src;
    ProgramValue dst;
    bool boundary = false;

    friend bool operator==(const DataFlowFact& a, const DataFlowFact& b) {
        return a.src == b.src && a.dst == b.dst && a.boundary == b.boundary;
    }
};

std::string to_string(const DataFlowFact& fact);

enum class EscapeKind { ToCalleeArgument, ToCallerReturn, ToGlobal };

const char* to_string(EscapeKind kind);

struct EscapeAnnotation {
    EscapeKind kind = EscapeKind::ToCallerReturn;
    ProgramValue value;
    std::optional<CallSite> call_site;   // required for ToCalleeArgument
    std::optional<int> argument_index;   // required for ToCalleeArgument
};

/// One feasible intra-procedural path with the facts that hold along it.
struct PathRecord {
    std::string path_id;
    std::vector<SourceLocation> statements;
    std::vector<DataFlowFact> facts;
    std::vector<EscapeAnnotation> escapes;
    std::string condition_notes;
    bool order_validated = false; // set by the validation stage before storage
};

struct MemoryStats {
    long hits = 0;
    long misses = 0;
};

/// The shared store M(f, v@s) -> {(path, facts)}. Doubles as the exploration
/// cache: a key, once stored, is never re-analyzed or overwritten. Concurrent
/// explorer workers coordinate through the claim-before-analyze reservation.
class AgentMemory {
public:
    AgentMemory() = default;
    AgentMemory(const AgentMemory&) = delete;
    AgentMemory& operator=(const AgentMemory&) = delete;

    /// Cache probe. Counts a hit when the key is present (waiting out an
    /// in-flight analysis of the same key first), a miss otherwise.
    std::optional<std::vector<PathRecord>> lookup(const std::string& function,
                                                  const ProgramValue& value);

    enum class StoreResult { Stored, AlreadyPresent };

    /// First store wins; AlreadyPresent leaves the original intact.
    /// Records must have passed order validation (asserted in debug builds).
    StoreResult store(const std::string& function, const ProgramValue& value,
                      std::vector<PathRecord> records);

    enum class ClaimResult { Claimed, Ready };

    /// Reservation step: Claimed obligates the caller to store() the key
    /// (blocking any concurrent claimer of the same key until then);
    /// Ready means a lookup() will now hit.
    ClaimResult claim(const std::string& function, const ProgramValue& value);

    MemoryStats stats() const;
    std::size_t key_count() const;

    /// Deterministic dump: entries sorted by key, schema-versioned.
    nlohmann::json dump() const;
    /// Rebuilds a memory whose lookups reproduce the dumped one.
    static std::unique_ptr<AgentMemory> from_dump(const nlohmann::json& doc);

private:
    struct Key {
        std::string function;
        std::string value;
        friend bool operator<(const Key& a, const Key& b) {
            return std::tie(a.function, a.value) < std::tie(b.function, b.value);
        }
    };
    struct Entry {
        bool pending = true;
        ProgramValue value;
        std::vector<PathRecord> records;
    };

    mutable std::mutex mu_;
    std::condition_variable ready_;
    std::map<Key, Entry> entries_;
    MemoryStats stats_;
};

nlohmann::json to_json(const ProgramValue& value);
ProgramValue program_value_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SourceLocation& loc);
SourceLocation source_location_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DataFlowFact& fact);
nlohmann::json to_json(const PathRecord& record);
PathRecord path_record_from_json(const nlohmann::json& doc);

} // namespace flowaudit
