// Command-line front end: fits quality curves, prices standalone and bundled
// services, sweeps market parameters to CSV, and cross-checks analytic
// demand against Monte Carlo. Exit codes: 0 success, 2 bad input or config,
// 3 numerically infeasible problem.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "iotprice/bundle.hpp"
#include "iotprice/coalition.hpp"
#include "iotprice/config.hpp"
#include "iotprice/csv.hpp"
#include "iotprice/errors.hpp"
#include "iotprice/quality.hpp"
#include "iotprice/simulate.hpp"
#include "iotprice/standalone.hpp"
#include "iotprice/sweep.hpp"

namespace {

using iotprice::csv::format_number;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw iotprice::ConfigError("cannot open output file '" + out_path + "'");
    f << text;
}

std::string key_line(const char* key, double v) {
    return std::string(key) + "=" + format_number(v) + "\n";
}

std::string key_line(const char* key, bool v) {
    return std::string(key) + "=" + (v ? "1" : "0") + "\n";
}

std::string cmd_fit(const std::string& samples_path) {
    std::ifstream f(samples_path);
    if (!f) throw iotprice::ConfigError("cannot open samples file '" + samples_path + "'");
    auto fit = iotprice::fit_quality_curve(iotprice::csv::read_samples(f));
    std::string out;
    out += key_line("alpha1", fit.curve.alpha1());
    out += key_line("alpha2", fit.curve.alpha2());
    out += key_line("alpha3", fit.curve.alpha3());
    out += key_line("residual", fit.mean_sq_residual);
    out += key_line("degenerate", fit.degenerate);
    return out;
}

std::string cmd_standalone(const std::string& config_path) {
    auto cfg = iotprice::config::load_config_file(config_path);
    if (cfg.services.size() != 1)
        throw iotprice::ConfigError("standalone needs a one-service config");
    auto s = iotprice::standalone::optimize(iotprice::sweep::standalone_market(cfg));
    std::string out;
    out += key_line("n_star", s.data_size);
    out += key_line("ps_star", s.fee);
    out += key_line("profit", s.profit);
    out += key_line("interior", s.interior);
    return out;
}

std::string cmd_bundle(const std::string& config_path, bool diagnose) {
    auto cfg = iotprice::config::load_config_file(config_path);
    if (cfg.services.size() != 2)
        throw iotprice::ConfigError("bundle needs a two-service config");
    auto m = iotprice::sweep::bundle_market(cfg);
    auto b = iotprice::bundle::optimize(m);
    double p1 = iotprice::standalone::optimize(
                    {cfg.customers, cfg.services[0].cost, cfg.services[0].curve}).profit;
    double p2 = iotprice::standalone::optimize(
                    {cfg.customers, cfg.services[1].cost, cfg.services[1].curve}).profit;
    auto game = iotprice::coalition::build_game(p1, p2, b.profit);
    auto core = iotprice::coalition::core_interval_2p(game);
    auto phi = iotprice::coalition::shapley(game);
    std::string out;
    out += "case=" + std::to_string(b.case_id) + "\n";
    out += key_line("pb_star", b.pb);
    out += key_line("n1_star", b.n1);
    out += key_line("n2_star", b.n2);
    out += key_line("profit", b.profit);
    out += key_line("profit1", p1);
    out += key_line("profit2", p2);
    out += key_line("core_lo", core.lo);
    out += key_line("core_hi", core.hi);
    out += key_line("core_empty", core.empty);
    out += key_line("shapley1", phi[0]);
    out += key_line("shapley2", phi[1]);
    if (diagnose) out += iotprice::bundle::describe(iotprice::bundle::closed_form_gap(m));
    return out;
}

std::string cmd_sweep(const std::string& config_path) {
    auto cfg = iotprice::config::load_config_file(config_path);
    std::ostringstream out;
    iotprice::sweep::run_sweep(cfg, out);
    return out.str();
}

std::string cmd_simulate(const std::string& config_path, long long samples,
                         std::uint64_t seed) {
    auto cfg = iotprice::config::load_config_file(config_path);
    iotprice::mc::Config mc{samples, seed};
    std::string out;
    double analytic = 0.0;
    iotprice::mc::Estimate est{};
    if (cfg.services.size() == 1) {
        auto s = iotprice::standalone::optimize(iotprice::sweep::standalone_market(cfg));
        double q = cfg.services[0].curve.value(s.data_size);
        double fee = cfg.fee.value_or(s.fee);
        analytic = std::clamp(1.0 - fee / q, 0.0, 1.0);
        est = iotprice::mc::standalone_demand(q, fee, mc);
        out += key_line("fee", fee);
        out += key_line("quality", q);
    } else {
        auto b = iotprice::bundle::optimize(iotprice::sweep::bundle_market(cfg));
        double q1 = cfg.services[0].curve.value(b.n1);
        double q2 = cfg.services[1].curve.value(b.n2);
        double fee = cfg.fee.value_or(b.pb);
        analytic = iotprice::bundle::demand_probability(q1, q2, fee);
        est = iotprice::mc::bundle_demand(q1, q2, fee, mc);
        out += key_line("fee", fee);
        out += key_line("quality1", q1);
        out += key_line("quality2", q2);
    }
    out += "samples=" + std::to_string(samples) + "\n";
    out += "seed=" + std::to_string(seed) + "\n";
    out += key_line("analytic", analytic);
    out += key_line("mc_mean", est.mean);
    out += key_line("mc_std_error", est.std_error);
    out += key_line("pass", std::abs(est.mean - analytic) <= 4.0 * est.std_error);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pricing toolkit for machine-learning IoT services"};
    app.require_subcommand(1);

    std::string samples_path, config_path, out_path;
    long long samples = 1000000;
    std::uint64_t seed = 1;
    bool diagnose = false;

    auto* fit = app.add_subcommand("fit", "Fit a quality curve to accuracy samples");
    fit->add_option("samples_csv", samples_path, "CSV with an n,accuracy header")->required();
    fit->add_option("--out", out_path, "Write the report to a file instead of stdout");

    auto* standalone =
        app.add_subcommand("standalone", "Optimal fee and data size for a single service");
    standalone->add_option("--config", config_path, "Market config file")->required();
    standalone->add_option("--out", out_path, "Write the report to a file instead of stdout");

    auto* bundle =
        app.add_subcommand("bundle", "Optimal bundle pricing and profit sharing");
    bundle->add_option("--config", config_path, "Market config file")->required();
    bundle->add_option("--out", out_path, "Write the report to a file instead of stdout");
    bundle->add_flag("--diagnose-closed-form", diagnose,
                     "Append a check of the direct case-1 constants");

    auto* sweep = app.add_subcommand("sweep", "CSV table over the config's sweep range");
    sweep->add_option("--config", config_path, "Market config file with a [sweep] section")
        ->required();
    sweep->add_option("--out", out_path, "Write the CSV to a file instead of stdout");

    auto* simulate =
        app.add_subcommand("simulate", "Monte Carlo demand check at the computed optimum");
    simulate->add_option("--config", config_path, "Market config file")->required();
    simulate->add_option("--out", out_path, "Write the report to a file instead of stdout");
    simulate->add_option("--samples", samples, "Monte Carlo sample count");
    simulate->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit clean, bad usage is an input error
    }

    try {
        if (fit->parsed()) emit(cmd_fit(samples_path), out_path);
        else if (standalone->parsed()) emit(cmd_standalone(config_path), out_path);
        else if (bundle->parsed()) emit(cmd_bundle(config_path, diagnose), out_path);
        else if (sweep->parsed()) emit(cmd_sweep(config_path), out_path);
        else if (simulate->parsed()) emit(cmd_simulate(config_path, samples, seed), out_path);
        return 0;
    } catch (const iotprice::UnderdeterminedFit& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const iotprice::InfeasibleMarket& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
