#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "flowaudit/audit.hpp"
#include "flowaudit/bugspec.hpp"
#include "flowaudit/errors.hpp"

namespace {

using namespace flowaudit;

struct CliArgs {
    std::string repo;
    std::string bug_types = "npd";
    int max_depth = 4;
    std::string model;
    std::string endpoint;
    std::string provider = "openai";
    std::string api_key_env = "AUDIT_API_KEY";
    std::string mock_dir;
    double temperature = 0.0;
    int max_output_tokens = 4096;
    int parallel_requests = 4;
    int parallel_sources = 4;
    std::string format = "json";
    std::string output = "-";
    bool no_abstraction = false;
    bool no_validators = false;
    bool no_cache = false;
    std::string dump_inventory_path;
    std::string dump_memory_path;
    std::string ledger_out;
    std::string config_path;
    std::string api_config_path;
    std::string rates_path;
    std::string few_shot_dir;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigInvalid("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// The configuration file takes precedence over command-line flags.
void apply_config_file(CliArgs& args) {
    if (args.config_path.empty())
        return;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(args.config_path));
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigInvalid(args.config_path + ": " + e.what());
    }
    auto str = [&](const char* key, std::string& into) {
        if (doc.contains(key))
            into = doc.at(key).get<std::string>();
    };
    auto num = [&](const char* key, auto& into) {
        if (doc.contains(key))
            into = doc.at(key).get<std::decay_t<decltype(into)>>();
    };
    auto flag = [&](const char* key, bool& into) {
        if (doc.contains(key))
            into = doc.at(key).get<bool>();
    };
    str("repo", args.repo);
    if (doc.contains("bug_types")) {
        if (doc.at("bug_types").is_array()) {
            std::string joined;
            for (const auto& v : doc.at("bug_types"))
                joined += (joined.empty() ? "" : ",") + v.get<std::string>();
            args.bug_types = joined;
        } else {
            args.bug_types = doc.at("bug_types").get<std::string>();
        }
    }
    num("max_depth", args.max_depth);
    str("model", args.model);
    str("endpoint", args.endpoint);
    str("provider", args.provider);
    str("api_key_env", args.api_key_env);
    str("mock_dir", args.mock_dir);
    num("temperature", args.temperature);
    num("max_output_tokens", args.max_output_tokens);
    num("parallel_requests", args.parallel_requests);
    num("parallel_sources", args.parallel_sources);
    str("format", args.format);
    str("output", args.output);
    flag("no_abstraction", args.no_abstraction);
    flag("no_validators", args.no_validators);
    flag("no_cache", args.no_cache);
    str("api_config", args.api_config_path);
    str("rates", args.rates_path);
    str("few_shot_dir", args.few_shot_dir);
}

RatesConfig load_rates(const std::string& path) {
    RatesConfig rates;
    if (path.empty())
        return rates;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }
    rates.input_per_million = doc.value("input_per_million", 0.0);
    rates.output_per_million = doc.value("output_per_million", 0.0);
    rates.currency = doc.value("currency", "USD");
    return rates;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowaudit: source-to-sink data-flow bug auditing over a source repository"};
    CliArgs args;

    app.add_option("--repo", args.repo, "repository root directory to audit");
    app.add_option("--bug-type", args.bug_types, "comma-separated bug types: npd,mlk,uaf")
        ->capture_default_str();
    app.add_option("--max-depth", args.max_depth,
                   "calling-context bound K: maximum functions per data-flow chain")
        ->capture_default_str();
    app.add_option("--model", args.model, "model identifier for the live backend");
    app.add_option("--endpoint", args.endpoint, "chat-completion endpoint URL for the live backend");
    app.add_option("--provider", args.provider, "request schema adapter: openai or anthropic")
        ->capture_default_str();
    app.add_option("--api-key-env", args.api_key_env,
                   "environment variable holding the backend API key")
        ->capture_default_str();
    app.add_option("--mock-dir", args.mock_dir,
                   "directory of scripted responses; enables the deterministic mock backend");
    app.add_option("--temperature", args.temperature, "decoding temperature")
        ->capture_default_str();
    app.add_option("--max-output-tokens", args.max_output_tokens, "response token cap")
        ->capture_default_str();
    app.add_option("--parallel-requests", args.parallel_requests, "in-flight model query budget")
        ->capture_default_str();
    app.add_option("--parallel-sources", args.parallel_sources,
                   "concurrent source scanning rounds")
        ->capture_default_str();
    app.add_option("--format", args.format, "output format: json, sarif or text")
        ->capture_default_str();
    app.add_option("--output", args.output, "output path ('-' = stdout)")->capture_default_str();
    app.add_flag("--no-abstraction", args.no_abstraction,
                 "ablation: omit the program-abstraction step from analysis prompts");
    app.add_flag("--no-validators", args.no_validators,
                 "ablation: disable the order and feasibility validators");
    app.add_flag("--no-cache", args.no_cache, "ablation: disable the agent-memory cache");
    app.add_option("--dump-inventory", args.dump_inventory_path,
                   "write the function inventory dump to this path");
    app.add_option("--dump-memory", args.dump_memory_path,
                   "write the agent-memory dump (JSON) to this path");
    app.add_option("--ledger-out", args.ledger_out, "write the run ledger (JSON) to this path");
    app.add_option("--config", args.config_path,
                   "JSON configuration file; its values override command-line flags");
    app.add_option("--api-config", args.api_config_path,
                   "bug-type configuration: per-type allocation/deallocation API lists");
    app.add_option("--rates", args.rates_path,
                   "pricing config (per-million-token rates) for the financial column");
    app.add_option("--few-shot-dir", args.few_shot_dir,
                   "directory of per-bug-type few-shot example files (npd.txt, ...)");

    CLI11_PARSE(app, argc, argv);

    DiagnosticLog diag;
    auto print_diagnostics = [&] {
        for (const auto& d : diag.snapshot())
            if (d.severity != Severity::Info)
                std::cerr << (d.severity == Severity::Warning ? "warning" : "error") << " ["
                          << d.component << "] " << d.message << "\n";
    };

    try {
        apply_config_file(args);

        AuditConfig config;
        config.repo_root = args.repo;
        std::stringstream types(args.bug_types);
        std::string type;
        config.bug_types.clear();
        while (std::getline(types, type, ','))
            if (!type.empty())
                config.bug_types.push_back(parse_bug_kind(type));
        config.max_depth = args.max_depth;
        config.no_abstraction = args.no_abstraction;
        config.no_validators = args.no_validators;
        config.no_cache = args.no_cache;
        config.format = output_format_from_string(args.format);
        config.parallel_requests = args.parallel_requests;
        config.parallel_sources = args.parallel_sources;
        config.decoding.temperature = args.temperature;
        config.decoding.max_output_tokens = args.max_output_tokens;
        config.rates = load_rates(args.rates_path);
        if (!args.mock_dir.empty()) {
            config.mock_dir = args.mock_dir;
        } else {
            config.http.endpoint = args.endpoint;
            config.http.provider = args.provider;
            config.http.model = args.model;
            if (const char* key = std::getenv(args.api_key_env.c_str()))
                config.http.api_key = key;
        }
        if (!args.few_shot_dir.empty())
            config.few_shot_dir = args.few_shot_dir;
        if (!args.api_config_path.empty())
            config.bug_config_json = read_file(args.api_config_path);

        const AuditResult result = run_audit(config, &diag);

        write_output(emit_report(result, config.format), args.output);
        if (!args.dump_inventory_path.empty())
            write_output(result.inventory_dump, args.dump_inventory_path);
        if (!args.dump_memory_path.empty())
            write_output(result.memory_dump.dump(2) + "\n", args.dump_memory_path);
        if (!args.ledger_out.empty())
            write_output(result.ledger->to_json(config.rates).dump(2) + "\n", args.ledger_out);

        print_diagnostics();

        const RunLedger& ledger = *result.ledger;
        std::cerr << "findings: " << result.reports.size() << "  prompts: " << ledger.prompt_rounds()
                  << "  tokens in/out: " << ledger.input_tokens() << "/" << ledger.output_tokens()
                  << "  cost: " << ledger.financial_cost(config.rates) << " " << config.rates.currency
                  << "  model time: " << ledger.model_seconds() << "s"
                  << "  wall time: " << ledger.wall_seconds() << "s"
                  << "  cache hits/misses: " << ledger.cache_hits() << "/" << ledger.cache_misses()
                  << "\n";
        return 0;
    } catch (const ConfigInvalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedBugType& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const RootNotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const BackendUnreachable& e) {
        print_diagnostics();
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const UnwritableOutput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        print_diagnostics();
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
