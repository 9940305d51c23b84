#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynregret/dynregret.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

int run_command(const std::string& config_path, const std::string& out_dir) {
    dynregret::ExperimentConfig cfg = dynregret::load_config(config_path);
    dynregret::apply_seed_env(cfg);
    const dynregret::RunResult res = dynregret::run(cfg);
    dynregret::write_outputs(res, out_dir);
    std::cout << "regret " << dynregret::detail::fmt(res.bounds.regret) << ", tightest bound "
              << dynregret::detail::fmt(res.bounds.tightest()) << ", all satisfied "
              << (res.bounds.all_satisfied() ? "yes" : "no") << '\n';
    return res.bounds.all_satisfied() ? kOk : kFail;
}

int verify_command(const std::string& suite, int seeds) {
    std::vector<std::string> suites;
    if (suite == "all")
        for (auto s : dynregret::kVerifySuites) suites.emplace_back(s);
    else
        suites.push_back(suite);
    bool all = true;
    for (const std::string& s : suites) {
        const dynregret::VerifyReport rep =
            dynregret::verify(s, seeds > 0 ? std::optional<int>(seeds) : std::nullopt);
        std::cout << dynregret::format_report(rep);
        all = all && rep.passed;
    }
    return all ? kOk : kFail;
}

int sweep_command(const std::string& config_path, const std::vector<std::string>& vary, const std::string& out_dir) {
    dynregret::ExperimentConfig cfg = dynregret::load_config(config_path);
    dynregret::apply_seed_env(cfg);
    std::vector<dynregret::SweepAxis> axes;
    for (const std::string& v : vary) axes.push_back(dynregret::parse_sweep_axis(v));
    const auto cells = dynregret::sweep(cfg, axes);
    dynregret::write_sweep(axes, cells, out_dir);
    int errors = 0;
    for (const auto& c : cells) errors += c.result ? 0 : 1;
    std::cout << cells.size() << " cells, " << errors << " with errors\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-regret experiments for online multiple gradient and Newton learners"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", suite;
    int seeds = 0;
    std::vector<std::string> vary;

    CLI::App* run = app.add_subcommand("run", "run one experiment and write rounds.csv and summary.txt");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory");

    CLI::App* verify = app.add_subcommand("verify", "run a property suite");
    verify->add_option("--suite", suite, "suite name or 'all'")->required();
    verify->add_option("--seeds", seeds, "instances or seeds (suite default when omitted)");

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid and write sweep.csv");
    sweep->add_option("--config", config_path, "base experiment config")->required();
    sweep->add_option("--vary", vary, "section.key=v1,v2,... (repeatable)");
    sweep->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return run_command(config_path, out_dir);
        if (*verify) return verify_command(suite, seeds);
        if (*sweep) return sweep_command(config_path, vary, out_dir);
    } catch (const dynregret::Error& e) {
        std::cerr << "error [" << dynregret::to_string(e.kind()) << "]: " << e.what() << '\n';
        return e.kind() == dynregret::ErrorKind::ConfigError ? kConfigError : kFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kFail;
}
