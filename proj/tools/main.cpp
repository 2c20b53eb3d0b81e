#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "coopgov/experiment.hpp"
#include "coopgov/governor.hpp"
#include "coopgov/llm_client.hpp"

namespace fs = std::filesystem;
using namespace coopgov;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string calibration_path = "data/calibration.json";
    std::string templates_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Scenario config JSON");
    cmd->add_option("--calibration", opts.calibration_path, "Calibration table JSON")
        ->capture_default_str();
    cmd->add_option("--templates", opts.templates_dir,
                    "Prompt template directory (built-in text when omitted)");
    auto* seed_opt = cmd->add_option("--seed", opts.seed, "Master seed (overrides config)");
    cmd->callback([seed_opt, &opts] { opts.seed_set = seed_opt->count() > 0; });
}

ScenarioConfig load_scenario(const CommonOptions& opts) {
    ScenarioConfig cfg =
        opts.config_path.empty() ? ScenarioConfig{} : ScenarioConfig::from_file(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    cfg.validate();
    return cfg;
}

struct LlmFlags {
    std::string base_url;
    std::string model = "llama3-70b";
    double temperature = 0.8;
    int max_retries = 3;
    int max_parallel = 4;
    std::string decision_log = "decisions.jsonl";
};

void add_llm_flags(CLI::App* cmd, LlmFlags& flags) {
    cmd->add_option("--llm-url", flags.base_url, "Chat-completion endpoint base URL");
    cmd->add_option("--model", flags.model, "Model name")->capture_default_str();
    cmd->add_option("--temperature", flags.temperature, "Sampling temperature")
        ->capture_default_str();
    cmd->add_option("--max-retries", flags.max_retries, "Retries per decision")
        ->capture_default_str();
    cmd->add_option("--max-parallel", flags.max_parallel, "In-flight request cap")
        ->capture_default_str();
    cmd->add_option("--decision-log", flags.decision_log, "JSON-lines attempt log")
        ->capture_default_str();
}

std::unique_ptr<AgentPolicy> make_agents(const ScenarioConfig& cfg, const CommonOptions& opts,
                                         const LlmFlags& llm) {
    if (cfg.agent_backend == "table")
        return std::make_unique<TableSla>(load_calibration(opts.calibration_path));

    LlmEndpointConfig endpoint;
    endpoint.base_url = llm.base_url;
    if (const char* url = std::getenv("COOPGOV_LLM_URL"); url && endpoint.base_url.empty())
        endpoint.base_url = url;
    if (const char* key = std::getenv("COOPGOV_LLM_API_KEY")) endpoint.api_key = key;
    endpoint.model = llm.model;
    endpoint.temperature = llm.temperature;
    endpoint.max_retries = llm.max_retries;
    endpoint.max_parallel = llm.max_parallel;
    endpoint.decision_log_path = llm.decision_log;

    PromptTemplate tpl = opts.templates_dir.empty() ? PromptTemplate::builtin()
                                                    : PromptTemplate::load_dir(opts.templates_dir);
    return std::make_unique<LlmSla>(std::move(endpoint), std::move(tpl), cfg.payoff);
}

std::unique_ptr<TierSelector> make_selector(const ScenarioConfig& cfg,
                                            std::unique_ptr<PolicyNetwork>& net_holder) {
    if (cfg.tier_policy.kind == TierPolicySpec::Kind::Static)
        return std::make_unique<StaticTierSelector>(cfg.tier_policy.static_tier);
    net_holder = std::make_unique<PolicyNetwork>(PolicyNetwork::load(cfg.tier_policy.checkpoint));
    return std::make_unique<GovernorTierSelector>(*net_holder);
}

void write_rounds(const std::vector<RoundLog>& rounds, const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (const auto& log : rounds) {
        std::ofstream out(out_dir + "/round_" + std::to_string(log.round_index) + ".json");
        out << log.to_json_text() << '\n';
    }
}

int count_invalid(const std::vector<RoundLog>& rounds) {
    int invalid = 0;
    for (const auto& log : rounds)
        if (!log.valid) {
            std::cerr << "round " << log.round_index << " invalid: " << log.error << '\n';
            ++invalid;
        }
    return invalid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Networked iterated-dilemma simulator with an RL information governor"};
    app.require_subcommand(1);

    CommonOptions opts;
    LlmFlags llm;

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run rounds and write logs + summary");
    add_common(simulate, opts);
    add_llm_flags(simulate, llm);
    std::string sim_out = "out";
    std::string sim_tier;
    std::string sim_checkpoint;
    int sim_rounds = 0;
    simulate->add_option("--out", sim_out, "Output directory")->capture_default_str();
    simulate->add_option("--tier", sim_tier, "Static tier override (LA, LA_AR, LA_NR)");
    simulate->add_option("--checkpoint", sim_checkpoint, "Governor checkpoint override");
    simulate->add_option("--rounds", sim_rounds, "Round-count override");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the governor and save a checkpoint");
    add_common(train_cmd, opts);
    TrainingConfig train_cfg;
    std::string train_out = "checkpoint.json";
    std::string curve_out = "curve.csv";
    train_cmd->add_option("--episodes", train_cfg.episodes, "Training episodes")
        ->capture_default_str();
    train_cmd->add_option("--entropy", train_cfg.entropy_coeff, "Entropy bonus coefficient")
        ->capture_default_str();
    train_cmd->add_option("--hidden", train_cfg.hidden, "Hidden layer width")
        ->capture_default_str();
    train_cmd->add_option("--out", train_out, "Checkpoint path")->capture_default_str();
    train_cmd->add_option("--curve", curve_out, "Learning-curve CSV path")->capture_default_str();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run the static baselines (and RL, if given)");
    add_common(sweep, opts);
    add_llm_flags(sweep, llm);
    std::string sweep_checkpoint;
    std::string sweep_out = "out";
    sweep->add_option("--checkpoint", sweep_checkpoint, "Trained governor checkpoint");
    sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();

    // microval
    auto* micro = app.add_subcommand("microval", "Measure per-view cooperation frequencies");
    add_common(micro, opts);
    add_llm_flags(micro, llm);
    int micro_trials = 100;
    std::string micro_out = "microval.csv";
    std::string micro_backend = "table";
    micro->add_option("--trials", micro_trials, "Trials per cell")->capture_default_str();
    micro->add_option("--out", micro_out, "Output CSV")->capture_default_str();
    micro->add_option("--backend", micro_backend, "table | llm")->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "Build CSV series and SVG charts from round logs");
    add_common(report, opts);
    std::string report_in = "out";
    std::string report_out = "report";
    report->add_option("--in", report_in, "Directory containing round_*.json")
        ->capture_default_str();
    report->add_option("--out", report_out, "Report output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            ScenarioConfig cfg = load_scenario(opts);
            if (!sim_tier.empty()) {
                cfg.tier_policy.kind = TierPolicySpec::Kind::Static;
                cfg.tier_policy.static_tier = tier_from_string(sim_tier);
            }
            if (!sim_checkpoint.empty()) {
                cfg.tier_policy.kind = TierPolicySpec::Kind::Rl;
                cfg.tier_policy.checkpoint = sim_checkpoint;
            }
            if (sim_rounds > 0) cfg.rounds = sim_rounds;
            cfg.validate();

            auto agents = make_agents(cfg, opts, llm);
            std::unique_ptr<PolicyNetwork> net_holder;
            auto selector = make_selector(cfg, net_holder);
            auto result = run_experiment(cfg, *agents, *selector);

            write_rounds(result.rounds, sim_out);
            write_summary_csv(sim_out + "/summary.csv",
                              {{cfg.tier_policy.describe(), result.summary, {}}});
            std::cout << "wrote " << result.rounds.size() << " rounds to " << sim_out << '\n';
            return count_invalid(result.rounds) == 0 ? 0 : 1;
        }

        if (*train_cmd) {
            ScenarioConfig cfg = load_scenario(opts);
            TableSla agents(load_calibration(opts.calibration_path));
            auto result = train(cfg, train_cfg, cfg.seed, agents);
            result.net.save(train_out, train_cfg.config_hash());
            write_learning_curve_csv(curve_out, result.curve);
            std::cout << "trained " << train_cfg.episodes << " episodes; checkpoint " << train_out
                      << ", curve " << curve_out << '\n';
            return 0;
        }

        if (*sweep) {
            ScenarioConfig cfg = load_scenario(opts);
            auto agents = make_agents(cfg, opts, llm);
            std::unique_ptr<PolicyNetwork> net;
            if (!sweep_checkpoint.empty())
                net = std::make_unique<PolicyNetwork>(PolicyNetwork::load(sweep_checkpoint));

            auto rows = sweep_baselines(cfg, *agents, net.get());
            fs::create_directories(sweep_out);
            write_summary_csv(sweep_out + "/summary.csv", rows);
            int invalid = 0;
            for (const auto& row : rows) {
                write_rounds(row.rounds, sweep_out + "/" + row.name);
                invalid += count_invalid(row.rounds);
            }
            std::cout << "wrote " << rows.size() << " scenario rows to " << sweep_out
                      << "/summary.csv\n";
            return invalid == 0 ? 0 : 1;
        }

        if (*micro) {
            ScenarioConfig cfg = load_scenario(opts);
            cfg.agent_backend = micro_backend;
            cfg.validate();
            auto agents = make_agents(cfg, opts, llm);
            const CalibrationTable table = load_calibration(opts.calibration_path);

            auto cells = calibration_grid(table, micro_trials);
            std::vector<MicrovalResult> results;
            results.reserve(cells.size());
            for (std::size_t k = 0; k < cells.size(); ++k)
                results.push_back(
                    microval(cells[k].scenario, *agents, seed_chain(cfg.seed, k)));
            write_microval_csv(micro_out, cells, results);
            std::cout << "wrote " << cells.size() << " cells to " << micro_out << '\n';
            return 0;
        }

        if (*report) {
            std::vector<RoundLog> rounds;
            for (const auto& entry : fs::directory_iterator(report_in)) {
                const std::string name = entry.path().filename().string();
                if (name.rfind("round_", 0) != 0 || entry.path().extension() != ".json") continue;
                std::ifstream in(entry.path());
                std::string text((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
                rounds.push_back(RoundLog::from_json_text(text));
            }
            std::sort(rounds.begin(), rounds.end(),
                      [](const RoundLog& a, const RoundLog& b) { return a.round_index < b.round_index; });
            emit_report(rounds, report_out);
            std::cout << "report for " << rounds.size() << " rounds written to " << report_out
                      << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
