#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vpp/vpp.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// key=value text config, one pair per line, '#' starts a comment
vpp::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vpp::ConfigError("cannot open config file: " + path);
  vpp::ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw vpp::ConfigError("config line " + std::to_string(lineno) +
                             ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "experiment") cfg.experiment = vpp::experiment_from_name(val);
      else if (key == "n_t") cfg.n_t = std::stoi(val);
      else if (key == "u") cfg.u = std::stoi(val);
      else if (key == "trials") cfg.trials = std::stoi(val);
      else if (key == "ese_samples") cfg.ese_samples = std::stoull(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "out") cfg.out_path = val;
      else if (key == "snr_db") cfg.snr_db_grid = parse_list(val);
      else if (key == "alpha_grid") cfg.alpha_grid = parse_list(val);
      else if (key == "fig1_ese") cfg.fig1_ese = std::stod(val);
      else if (key == "fig1_d") cfg.fig1_d = std::stod(val);
      else if (key == "fig1_points") cfg.fig1_points = std::stoi(val);
      else throw vpp::ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
      throw vpp::ConfigError("config line " + std::to_string(lineno) +
                             ": bad value for " + key);
    }
  }
  return cfg;
}

void apply_common(CLI::App* sub, vpp::ExperimentConfig& cfg, std::string& snr_text,
                  std::string& alpha_text) {
  sub->add_option("--seed", cfg.seed, "experiment seed");
  sub->add_option("--trials", cfg.trials, "number of channel realizations");
  sub->add_option("--out", cfg.out_path, "output CSV path");
  sub->add_option("--nt", cfg.n_t, "transmit antennas");
  sub->add_option("--users", cfg.u, "candidate users");
  sub->add_option("--ese-samples", cfg.ese_samples, "Monte-Carlo samples per E_se");
  sub->add_option("--snr", snr_text, "comma-separated SNR grid in dB");
  sub->add_option("--alpha-grid", alpha_text, "comma-separated SUS alpha sweep");
}

int execute(const vpp::ExperimentConfig& cfg) {
  vpp::ResultTable table = vpp::run(cfg);
  if (cfg.out_path.empty()) vpp::write_csv(table, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-perturbation precoding simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
  run_cmd->add_option("--config", config_path, "key=value config file")->required();

  vpp::ExperimentConfig cli_cfg;
  std::string snr_text, alpha_text, table_kind = "users", sched_kind = "loss";

  auto* fig1 = app.add_subcommand("fig1", "per-user mutual information vs lambda");
  apply_common(fig1, cli_cfg, snr_text, alpha_text);
  fig1->add_option("--ese", cli_cfg.fig1_ese, "fixed E_se");
  fig1->add_option("--d", cli_cfg.fig1_d, "fixed channel gain d_k");
  fig1->add_option("--points", cli_cfg.fig1_points, "lambda grid size");

  auto* sweep = app.add_subcommand("sweep", "sum rate and bounds vs SNR");
  apply_common(sweep, cli_cfg, snr_text, alpha_text);

  auto* sched = app.add_subcommand("sched", "user-selection experiments");
  apply_common(sched, cli_cfg, snr_text, alpha_text);
  sched->add_option("--kind", sched_kind, "loss | vs-users | ra");

  auto* tables = app.add_subcommand("tables", "selected-user and effort tables");
  apply_common(tables, cli_cfg, snr_text, alpha_text);
  tables->add_option("--kind", table_kind, "users | mults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return execute(load_config(config_path));
    if (!snr_text.empty()) cli_cfg.snr_db_grid = parse_list(snr_text);
    if (!alpha_text.empty()) cli_cfg.alpha_grid = parse_list(alpha_text);
    if (fig1->parsed()) cli_cfg.experiment = vpp::Experiment::Fig1;
    if (sweep->parsed()) cli_cfg.experiment = vpp::Experiment::SumrateSweep;
    if (sched->parsed()) {
      if (sched_kind == "loss") cli_cfg.experiment = vpp::Experiment::SchedLoss;
      else if (sched_kind == "vs-users") cli_cfg.experiment = vpp::Experiment::SchedVsUsers;
      else if (sched_kind == "ra") cli_cfg.experiment = vpp::Experiment::RaCompare;
      else throw vpp::ConfigError("unknown sched kind: " + sched_kind);
    }
    if (tables->parsed()) {
      if (table_kind == "users") cli_cfg.experiment = vpp::Experiment::TableUsers;
      else if (table_kind == "mults") cli_cfg.experiment = vpp::Experiment::TableMults;
      else throw vpp::ConfigError("unknown tables kind: " + table_kind);
    }
    return execute(cli_cfg);
  } catch (const std::exception& e) {
    std::cerr << "vpbench: " << e.what() << "\n";
    return 1;
  }
}
