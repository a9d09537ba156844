#include "flowaudit/memory.hpp"

#include <cassert>

#include "flowaudit/errors.hpp"

namespace flowaudit {

std::string to_string(const DataFlowFact& fact) {
    return fact.src.variable + "@" + std::to_string(fact.src.location.line) + " -> " +
           fact.dst.variable + "@" + std::to_string(fact.dst.location.line);
}

const char* to_string(EscapeKind kind) {
    switch (kind) {
    case EscapeKind::ToCalleeArgument: return "to_callee_argument";
    case EscapeKind::ToCallerReturn: return "to_caller_return";
    case EscapeKind::ToGlobal: return "to_global";
    }
    return "to_global";
}

std::optional<std::vector<PathRecord>> AgentMemory::lookup(const std::string& function,
                                                           const ProgramValue& value) {
    std::unique_lock<std::mutex> lock(mu_);
    const Key key{function, value_key(value)};
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        ++stats_.misses;
        return std::nullopt;
    }
    ready_.wait(lock, [&] { return !entries_.at(key).pending; });
    ++stats_.hits;
    return entries_.at(key).records;
}

AgentMemory::StoreResult AgentMemory::store(const std::string& function, const ProgramValue& value,
                                            std::vector<PathRecord> records) {
#ifndef NDEBUG
    for (const auto& record : records)
        assert(record.order_validated && "PathRecord stored without order validation");
#endif
    std::unique_lock<std::mutex> lock(mu_);
    const Key key{function, value_key(value)};
    auto it = entries_.find(key);
    if (it != entries_.end() && !it->second.pending)
        return StoreResult::AlreadyPresent;
    Entry& entry = entries_[key];
    entry.pending = false;
    entry.value = value;
    entry.records = std::move(records);
    lock.unlock();
    ready_.notify_all();
    return StoreResult::Stored;
}

AgentMemory::ClaimResult AgentMemory::claim(const std::string& function, const ProgramValue& value) {
    std::unique_lock<std::mutex> lock(mu_);
    const Key key{function, value_key(value)};
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        Entry& entry = entries_[key];
        entry.pending = true;
        entry.value = value;
        ++stats_.misses; // the reservation is the key's first access
        return ClaimResult::Claimed;
    }
    ready_.wait(lock, [&] { return !entries_.at(key).pending; });
    return ClaimResult::Ready; // the follow-up lookup counts the hit
}

MemoryStats AgentMemory::stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stats_;
}

std::size_t AgentMemory::key_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
}

nlohmann::json to_json(const SourceLocation& loc) {
    return {{"file", loc.file}, {"line", loc.line}, {"column", loc.column}};
}

SourceLocation source_location_from_json(const nlohmann::json& doc) {
    return {doc.at("file").get<std::string>(), doc.at("line").get<int>(),
            doc.at("column").get<int>()};
}

nlohmann::json to_json(const ProgramValue& value) {
    return {{"variable", value.variable},
            {"location", to_json(value.location)},
            {"function", value.function},
            {"role", to_string(value.role)}};
}

ProgramValue program_value_from_json(const nlohmann::json& doc) {
    return {doc.at("variable").get<std::string>(), source_location_from_json(doc.at("location")),
            doc.at("function").get<std::string>(),
            value_role_from_string(doc.at("role").get<std::string>())};
}

nlohmann::json to_json(const DataFlowFact& fact) {
    return {{"src", to_json(fact.src)}, {"dst", to_json(fact.dst)}, {"boundary", fact.boundary}};
}

nlohmann::json to_json(const PathRecord& record) {
    nlohmann::json statements = nlohmann::json::array();
    for (const auto& s : record.statements)
        statements.push_back(to_json(s));
    nlohmann::json facts = nlohmann::json::array();
    for (const auto& f : record.facts)
        facts.push_back(to_json(f));
    nlohmann::json escapes = nlohmann::json::array();
    for (const auto& e : record.escapes) {
        nlohmann::json entry = {{"kind", to_string(e.kind)}, {"value", to_json(e.value)}};
        if (e.call_site) {
            entry["callee"] = e.call_site->callee_name;
            entry["call_line"] = e.call_site->location.line;
        }
        if (e.argument_index)
            entry["argument_index"] = *e.argument_index;
        escapes.push_back(std::move(entry));
    }
    return {{"path_id", record.path_id},
            {"statements", std::move(statements)},
            {"facts", std::move(facts)},
            {"escapes", std::move(escapes)},
            {"condition_notes", record.condition_notes},
            {"order_validated", record.order_validated}};
}

PathRecord path_record_from_json(const nlohmann::json& doc) {
    PathRecord record;
    record.path_id = doc.at("path_id").get<std::string>();
    for (const auto& s : doc.at("statements"))
        record.statements.push_back(source_location_from_json(s));
    for (const auto& f : doc.at("facts")) {
        DataFlowFact fact{program_value_from_json(f.at("src")), program_value_from_json(f.at("dst")),
                          f.at("boundary").get<bool>()};
        record.facts.push_back(std::move(fact));
    }
    for (const auto& e : doc.at("escapes")) {
        EscapeAnnotation esc;
        const std::string kind = e.at("kind").get<std::string>();
        if (kind == "to_callee_argument")
            esc.kind = EscapeKind::ToCalleeArgument;
        else if (kind == "to_caller_return")
            esc.kind = EscapeKind::ToCallerReturn;
        else
            esc.kind = EscapeKind::ToGlobal;
        esc.value = program_value_from_json(e.at("value"));
        if (e.contains("callee")) {
            CallSite site;
            site.callee_name = e.at("callee").get<std::string>();
            site.location = {esc.value.location.file, e.at("call_line").get<int>(), 0};
            site.caller = esc.value.function;
            esc.call_site = std::move(site);
        }
        if (e.contains("argument_index"))
            esc.argument_index = e.at("argument_index").get<int>();
        record.escapes.push_back(std::move(esc));
    }
    record.condition_notes = doc.at("condition_notes").get<std::string>();
    record.order_validated = doc.at("order_validated").get<bool>();
    return record;
}

nlohmann::json AgentMemory::dump() const {
    std::lock_guard<std::mutex> lock(mu_);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, entry] : entries_) {
        if (entry.pending)
            continue;
        nlohmann::json paths = nlohmann::json::array();
        for (const auto& record : entry.records)
            paths.push_back(to_json(record));
        entries.push_back({{"function", key.function},
                           {"value", to_json(entry.value)},
                           {"paths", std::move(paths)}});
    }
    return {{"schema_version", "1.0"},
            {"entries", std::move(entries)},
            {"stats", {{"hits", stats_.hits}, {"misses", stats_.misses}}}};
}

std::unique_ptr<AgentMemory> AgentMemory::from_dump(const nlohmann::json& doc) {
    auto memory = std::make_unique<AgentMemory>();
    for (const auto& entry : doc.at("entries")) {
        const ProgramValue value = program_value_from_json(entry.at("value"));
        std::vector<PathRecord> records;
        for (const auto& p : entry.at("paths"))
            records.push_back(path_record_from_json(p));
        memory->store(entry.at("function").get<std::string>(), value, std::move(records));
    }
    return memory;
}

} // namespace flowaudit
