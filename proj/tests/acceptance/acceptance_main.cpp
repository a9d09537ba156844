// Acceptance suite: one pass/fail line per criterion, exit 0 only when every
// gating criterion holds. Criterion 10 (live backend smoke) is non-gating and
// runs only when AUDIT_SMOKE_ENDPOINT is set.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "flowaudit/audit.hpp"
#include "flowaudit/explorer.hpp"
#include "flowaudit/frontend.hpp"
#include "flowaudit/validators.hpp"

#include "support/fixtures.hpp"
#include "support/gen_oracle.hpp"
#include "support/temp_dir.hpp"

using namespace flowaudit;
using namespace testsupport;

namespace {

struct Criterion {
    int number;
    std::string title;
    bool passed = false;
    bool gating = true;
    bool skipped = false;
    std::string detail;
};

std::vector<Criterion> results;

void record(int number, const std::string& title, bool passed, const std::string& detail = "") {
    results.push_back({number, title, passed, true, false, detail});
}

void record_skip(int number, const std::string& title, const std::string& detail) {
    results.push_back({number, title, false, false, true, detail});
}

AuditConfig mock_config(const TempDir& repo, const TempDir& mock, BugKind kind) {
    AuditConfig config;
    config.repo_root = repo.path();
    config.bug_types = {kind};
    config.mock_dir = mock.path();
    return config;
}

std::string chain_node_sequence(const BugCandidate& c) {
    std::ostringstream os;
    if (!c.chain.empty())
        os << c.chain.front().src.variable << "@" << c.chain.front().src.location.file << ":"
           << c.chain.front().src.location.line;
    for (const auto& fact : c.chain)
        os << " -> " << fact.dst.variable << "@" << fact.dst.location.file << ":"
           << fact.dst.location.line;
    return os.str();
}

long total_memory_keys(const AuditResult& result) {
    long keys = 0;
    for (const auto& [bug, dump] : result.memory_dump.items()) {
        (void)bug;
        keys += static_cast<long>(dump.at("entries").size());
    }
    return keys;
}

// ---------------------------------------------------------------------------

void criterion_1_and_2() {
    TempDir repo("acc1repo");
    TempDir mock("acc1mock");
    write_fig2_repo(repo);
    script_fig2_npd(mock.path(), index_repository(repo.path()));

    const auto start = std::chrono::steady_clock::now();
    AuditResult result = run_audit(mock_config(repo, mock, BugKind::NullDereference));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool ok = result.reports.size() == 1;
    std::string detail;
    if (!ok) {
        detail = "expected 1 report, got " + std::to_string(result.reports.size());
    } else {
        const BugCandidate& c = result.reports[0].candidate;
        const std::string seq = chain_node_sequence(c);
        const std::string want = "NULL@field2json.c:4 -> json@field2json.c:4 -> "
                                 "json@field2json.c:14 -> field_json@parse_msg.c:7 -> "
                                 "field_json@parse_msg.c:8";
        if (c.chain.size() != 4) {
            ok = false;
            detail = "chain has " + std::to_string(c.chain.size()) + " facts, expected 4";
        } else if (seq != want) {
            ok = false;
            detail = "chain " + seq + " != " + want;
        } else if (seconds >= 5.0) {
            ok = false;
            detail = "run took " + std::to_string(seconds) + "s (limit 5s)";
        } else {
            detail = "one NPD report, four-fact chain, " + std::to_string(seconds).substr(0, 5) +
                     "s, mock backend only";
        }
    }
    record(1, "fixture reproduction: single NPD report with the expected fact chain", ok, detail);

    // criterion 2: the memory dump for (field2json, NULL@4)
    bool found = false;
    bool multiplicities_ok = false;
    for (const auto& entry : result.memory_dump.at("npd").at("entries")) {
        const auto& value = entry.at("value");
        if (value.at("variable") == "NULL" && value.at("location").at("line") == 4 &&
            value.at("location").at("file") == "field2json.c") {
            found = true;
            std::multiset<std::size_t> sizes;
            for (const auto& path : entry.at("paths"))
                sizes.insert(path.at("facts").size());
            multiplicities_ok = entry.at("paths").size() == 3 &&
                                sizes == std::multiset<std::size_t>({2, 1, 1});
        }
    }
    record(2, "memory conformance: (field2json, NULL@4) holds 3 paths with fact counts {2,1,1}",
           found && multiplicities_ok,
           found ? (multiplicities_ok ? "3 path records, fact multiset {2,1,1}"
                                      : "entry found but path/fact shape differs")
                 : "no memory entry for (field2json, NULL@4)");
}

void criterion_3() {
    std::mt19937 rng(2024);
    int functions = 0;
    int facts_checked = 0;
    int disagreements = 0;
    for (unsigned seed = 1; seed <= 120; ++seed) {
        FunctionGenerator gen(seed);
        GenFunction spec = gen.generate();
        TempDir repo("acc3");
        repo.write("gen.c", spec.source);
        FunctionInventory inv = index_repository(repo.path());
        const FunctionRecord& fn = fn_by_name(inv, "gen_fn");
        ++functions;

        PathRecord path;
        path.path_id = "p1";
        for (int line : spec.stmt_lines)
            path.statements.push_back({fn.file, line, 0});

        std::vector<DataFlowFact> facts;
        std::vector<bool> expected;
        for (int i = 0; i < 10; ++i) {
            const int l1 = spec.stmt_lines[rng() % spec.stmt_lines.size()];
            const int l2 = spec.stmt_lines[rng() % spec.stmt_lines.size()];
            const auto& vars1 = spec.vars_at_line.at(l1);
            const auto& vars2 = spec.vars_at_line.at(l2);
            const std::string u = vars1[rng() % vars1.size()];
            const std::string v = vars2[rng() % vars2.size()];
            facts.push_back({{u, {fn.file, l1, 0}, fn.id, ValueRole::Intermediate},
                             {v, {fn.file, l2, 0}, fn.id, ValueRole::Intermediate},
                             false});
            if (l1 == l2) {
                auto it = spec.assign_at_line.find(l1);
                expected.push_back(it != spec.assign_at_line.end() && it->second.first == v &&
                                   it->second.second == u);
            } else {
                expected.push_back(spec.order_possible(l1, l2));
            }
        }
        const auto verdicts = validate_order(facts, fn, path);
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            ++facts_checked;
            if ((verdicts[i].verdict == OrderVerdict::Consistent) != expected[i])
                ++disagreements;
        }
    }
    record(3, "order-validator oracle equivalence on generated loop-free functions",
           functions >= 100 && disagreements == 0,
           std::to_string(functions) + " functions, " + std::to_string(facts_checked) +
               " facts, " + std::to_string(disagreements) + " disagreements");
}

// script_fig2_npd has a default argument, so wrap it for the fixture table
void script_fig2_npd_thunk(const std::filesystem::path& dir, const FunctionInventory& inv) {
    script_fig2_npd(dir, inv);
}

void criterion_4() {
    // bound: gateway analysis calls <= distinct (function, value) keys, on every fixture
    struct Fixture {
        const char* name;
        void (*write)(const TempDir&);
        void (*script)(const std::filesystem::path&, const FunctionInventory&);
        BugKind kind;
        int max_depth;
    };
    auto write_mlk_leak = +[](const TempDir& d) { d.write("m.c", kMlkLeakSource); };
    auto write_mlk_freed = +[](const TempDir& d) { d.write("m.c", kMlkFreedSource); };
    const Fixture fixtures[] = {
        {"fig2", &write_fig2_repo, &script_fig2_npd_thunk, BugKind::NullDereference, 4},
        {"chain6", &write_chain6_repo, &script_chain6_npd, BugKind::NullDereference, 6},
        {"shared", &write_shared_repo, &script_shared_npd, BugKind::NullDereference, 4},
        {"mlk-leak", write_mlk_leak, &script_mlk_leak, BugKind::MemoryLeak, 4},
        {"mlk-freed", write_mlk_freed, &script_mlk_freed, BugKind::MemoryLeak, 4},
    };
    bool bound_holds = true;
    std::string detail;
    for (const auto& fixture : fixtures) {
        TempDir repo(std::string("acc4") + fixture.name);
        TempDir mock(std::string("acc4m") + fixture.name);
        fixture.write(repo);
        fixture.script(mock.path(), index_repository(repo.path()));
        AuditConfig config = mock_config(repo, mock, fixture.kind);
        config.max_depth = fixture.max_depth;
        AuditResult result = run_audit(config);
        const long keys = total_memory_keys(result);
        const long calls = result.ledger->analysis_queries();
        detail += std::string(fixture.name) + ": " + std::to_string(calls) + "<=" +
                  std::to_string(keys) + "  ";
        if (calls > keys)
            bound_holds = false;
    }

    // direction check: --no-cache strictly exceeds the cached run
    TempDir repo("acc4nc");
    TempDir mock("acc4ncm");
    write_shared_repo(repo);
    script_shared_npd(mock.path(), index_repository(repo.path()));
    AuditResult cached = run_audit(mock_config(repo, mock, BugKind::NullDereference));
    AuditConfig nc = mock_config(repo, mock, BugKind::NullDereference);
    nc.no_cache = true;
    AuditResult uncached = run_audit(nc);
    const bool strictly_more =
        uncached.ledger->analysis_queries() > cached.ledger->analysis_queries();
    detail += "no-cache " + std::to_string(uncached.ledger->analysis_queries()) + ">" +
              std::to_string(cached.ledger->analysis_queries());
    record(4, "caching bound: analysis calls <= distinct keys; no-cache strictly exceeds",
           bound_holds && strictly_more, detail);
}

void criterion_5() {
    TempDir repo("acc5");
    TempDir mock("acc5m");
    write_chain6_repo(repo);
    script_chain6_npd(mock.path(), index_repository(repo.path()));

    AuditConfig k4 = mock_config(repo, mock, BugKind::NullDereference);
    k4.max_depth = 4;
    AuditResult at4 = run_audit(k4);

    AuditConfig k6 = mock_config(repo, mock, BugKind::NullDereference);
    k6.max_depth = 6;
    AuditResult at6 = run_audit(k6);

    bool depth_respected = true;
    for (const auto& report : at6.reports)
        if (static_cast<int>(report.candidate.segments.size()) > 6)
            depth_respected = false;
    for (const auto& report : at4.reports)
        if (static_cast<int>(report.candidate.segments.size()) > 4)
            depth_respected = false;

    const bool ok = at4.reports.empty() && at6.reports.size() == 1 && depth_respected;
    record(5, "depth bound: six-function chain invisible at K=4, found at K=6",
           ok,
           "K=4: " + std::to_string(at4.reports.size()) + " reports, K=6: " +
               std::to_string(at6.reports.size()) + " reports");
}

void criterion_6() {
    TempDir leak_repo("acc6a");
    TempDir leak_mock("acc6am");
    leak_repo.write("m.c", kMlkLeakSource);
    script_mlk_leak(leak_mock.path(), index_repository(leak_repo.path()));
    AuditResult leak = run_audit(mock_config(leak_repo, leak_mock, BugKind::MemoryLeak));

    TempDir freed_repo("acc6b");
    TempDir freed_mock("acc6bm");
    freed_repo.write("m.c", kMlkFreedSource);
    script_mlk_freed(freed_mock.path(), index_repository(freed_repo.path()));
    AuditResult freed = run_audit(mock_config(freed_repo, freed_mock, BugKind::MemoryLeak));

    const bool ok = leak.reports.size() == 1 &&
                    leak.reports[0].candidate.terminal == TerminalKind::NoSinkOnPath &&
                    freed.reports.empty();
    record(6, "memory-leak rule: branch leak reported once, all-paths-freed variant silent", ok,
           "leak fixture: " + std::to_string(leak.reports.size()) + ", freed fixture: " +
               std::to_string(freed.reports.size()));
}

void criterion_7() {
    TempDir repo("acc7");
    TempDir mock("acc7m");
    write_fig2_repo(repo);
    script_fig2_npd(mock.path(), index_repository(repo.path()),
                    "CONTRADICTION\nrepeated cannot be both true and false.");

    AuditResult with_validators = run_audit(mock_config(repo, mock, BugKind::NullDereference));
    AuditConfig ablated = mock_config(repo, mock, BugKind::NullDereference);
    ablated.no_validators = true;
    AuditResult without_validators = run_audit(ablated);

    const bool discarded_only_with_validators =
        with_validators.reports.empty() && without_validators.reports.size() == 1;
    const bool monotone = with_validators.reports.size() <= without_validators.reports.size();
    record(7, "validator monotonicity: contradiction discarded only when validators are on",
           discarded_only_with_validators && monotone,
           "validators on: " + std::to_string(with_validators.reports.size()) + ", off: " +
               std::to_string(without_validators.reports.size()));
}

void criterion_8() {
    TempDir repo("acc8");
    TempDir mock("acc8m");
    write_fig2_repo(repo);
    script_fig2_npd(mock.path(), index_repository(repo.path()));

    AuditResult a = run_audit(mock_config(repo, mock, BugKind::NullDereference));
    AuditResult b = run_audit(mock_config(repo, mock, BugKind::NullDereference));
    const bool reports_identical = emit_report_json(a, false) == emit_report_json(b, false);
    const bool memories_identical = a.memory_dump.dump(2) == b.memory_dump.dump(2);
    record(8, "determinism: identical runs give byte-identical reports and memory dumps",
           reports_identical && memories_identical,
           std::string("reports ") + (reports_identical ? "==" : "!=") + ", memory dumps " +
               (memories_identical ? "==" : "!="));
}

void criterion_9() {
    TempDir repo("acc9");
    TempDir mock("acc9m");
    write_fig2_repo(repo);
    script_fig2_npd(mock.path(), index_repository(repo.path()));
    AuditConfig config = mock_config(repo, mock, BugKind::NullDereference);
    config.rates = {3.0, 15.0, "USD"};
    AuditResult result = run_audit(config);

    long sum_in = 0, sum_out = 0;
    for (const auto& entry : result.ledger->entries()) {
        sum_in += entry.input_tokens;
        sum_out += entry.output_tokens;
    }
    const bool totals_exact = result.ledger->input_tokens() == sum_in &&
                              result.ledger->output_tokens() == sum_out && sum_in == 600 &&
                              sum_out == 60;
    const double expected_cost = static_cast<double>(sum_in) / 1e6 * config.rates.input_per_million +
                                 static_cast<double>(sum_out) / 1e6 * config.rates.output_per_million;
    const bool cost_exact = result.ledger->financial_cost(config.rates) == expected_cost;
    record(9, "ledger exactness: token totals and financial cost match the scripts",
           totals_exact && cost_exact,
           "tokens " + std::to_string(sum_in) + "/" + std::to_string(sum_out) + ", cost " +
               std::to_string(result.ledger->financial_cost(config.rates)));
}

void criterion_10() {
    const char* endpoint = std::getenv("AUDIT_SMOKE_ENDPOINT");
    if (!endpoint || !*endpoint) {
        record_skip(10, "live smoke test (manual, non-gating)",
                    "set AUDIT_SMOKE_ENDPOINT (and AUDIT_API_KEY/AUDIT_SMOKE_MODEL) to run");
        return;
    }
    TempDir repo("acc10");
    write_fig2_repo(repo);
    AuditConfig config;
    config.repo_root = repo.path();
    config.bug_types = {BugKind::NullDereference};
    config.http.endpoint = endpoint;
    if (const char* provider = std::getenv("AUDIT_SMOKE_PROVIDER"))
        config.http.provider = provider;
    if (const char* model = std::getenv("AUDIT_SMOKE_MODEL"))
        config.http.model = model;
    if (const char* key = std::getenv("AUDIT_API_KEY"))
        config.http.api_key = key;
    try {
        AuditResult result = run_audit(config);
        Criterion c{10, "live smoke test (manual, non-gating)", true, false, false,
                    std::to_string(result.reports.size()) + " reports, " +
                        std::to_string(result.ledger->prompt_rounds()) + " prompts"};
        results.push_back(c);
    } catch (const std::exception& e) {
        Criterion c{10, "live smoke test (manual, non-gating)", false, false, false, e.what()};
        results.push_back(c);
    }
}

} // namespace

int main() {
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();

    bool all_gating_passed = true;
    for (const auto& c : results) {
        std::string status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
        std::cout << "[" << status << "] criterion " << c.number << ": " << c.title;
        if (!c.detail.empty())
            std::cout << " — " << c.detail;
        std::cout << "\n";
        if (c.gating && !c.skipped && !c.passed)
            all_gating_passed = false;
    }
    std::cout << (all_gating_passed ? "acceptance: all gating criteria passed\n"
                                    : "acceptance: FAILURES above\n");
    return all_gating_passed ? 0 : 1;
}
