#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vpp/engine.hpp"
#include "vpp/rates.hpp"
#include "vpp/rng.hpp"
#include "vpp/scheduler.hpp"
#include "vpp/waterfill.hpp"

namespace vpp {

inline constexpr const char* kVersion = "vpbench 0.1.0";

enum class Experiment {
  Fig1,
  SumrateSweep,
  SchedLoss,
  SchedVsUsers,
  RaCompare,
  TableUsers,
  TableMults,
};

inline Experiment experiment_from_name(const std::string& name) {
  if (name == "fig1") return Experiment::Fig1;
  if (name == "sumrate_sweep") return Experiment::SumrateSweep;
  if (name == "sched_loss") return Experiment::SchedLoss;
  if (name == "sched_vs_users") return Experiment::SchedVsUsers;
  if (name == "ra_compare") return Experiment::RaCompare;
  if (name == "table_users") return Experiment::TableUsers;
  if (name == "table_mults") return Experiment::TableMults;
  throw ConfigError("unknown experiment: " + name);
}

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Fig1: return "fig1";
    case Experiment::SumrateSweep: return "sumrate_sweep";
    case Experiment::SchedLoss: return "sched_loss";
    case Experiment::SchedVsUsers: return "sched_vs_users";
    case Experiment::RaCompare: return "ra_compare";
    case Experiment::TableUsers: return "table_users";
    case Experiment::TableMults: return "table_mults";
  }
  return "?";
}

struct ExperimentConfig {
  Experiment experiment = Experiment::SumrateSweep;
  int n_t = 8;
  int u = 8;
  std::vector<double> snr_db_grid = {0, 5, 10, 15, 20, 25, 30};
  int trials = 1000;
  std::uint64_t ese_samples = 2000;
  std::vector<double> alpha_grid;  // empty -> 21 points on [0, 1]
  std::uint64_t seed = 1;
  std::string out_path;
  // fig1 controls
  double fig1_ese = 0.1;
  double fig1_d = 1.0;
  int fig1_points = 400;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> metadata;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline void write_csv(const ResultTable& table, std::ostream& os) {
  for (const auto& m : table.metadata) os << "# " << m << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
  std::ostringstream num;
  num.precision(12);
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      num.str("");
      num << row[c];
      os << num.str() << (c + 1 < row.size() ? "," : "\n");
    }
  }
}

namespace detail {

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.u < 1) throw ConfigError("u must be >= 1");
  if (cfg.n_t < 1) throw ConfigError("n_t must be >= 1");
  if (cfg.snr_db_grid.empty()) throw ConfigError("snr_db_grid must be nonempty");
  if (cfg.experiment == Experiment::SchedLoss && cfg.u > 12)
    throw ConfigError("sched_loss runs an exhaustive search; u must be <= 12");
  for (double a : cfg.alpha_grid)
    if (a < 0.0 || a > 1.0) throw ConfigError("alpha values must lie in [0, 1]");
}

inline std::vector<double> alpha_grid_or_default(const ExperimentConfig& cfg) {
  if (!cfg.alpha_grid.empty()) return cfg.alpha_grid;
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
  return g;
}

inline std::vector<std::string> config_metadata(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment=" << experiment_name(cfg.experiment) << " n_t=" << cfg.n_t
     << " u=" << cfg.u << " trials=" << cfg.trials
     << " ese_samples=" << cfg.ese_samples << " seed=" << cfg.seed;
  return {std::string(kVersion), "channel=iid-rayleigh-cn01", os.str()};
}

inline ChannelSet draw_channel_set(const ExperimentConfig& cfg, std::uint64_t trial) {
  Rng rng(cfg.seed, trial);
  ChannelSet ch;
  ch.n_t = cfg.n_t;
  ch.users.reserve(cfg.u);
  CMatrix h = gen_channel(cfg.u, cfg.n_t, rng);
  for (int i = 0; i < cfg.u; ++i) ch.users.push_back(h.row(i));
  return ch;
}

inline CMatrix subset_matrix(const ChannelSet& ch, const std::vector<int>& rows) {
  CMatrix h(rows.size(), ch.n_t);
  for (std::size_t i = 0; i < rows.size(); ++i) h.row(i) = ch.users[rows[i]];
  return h;
}

// exact VP sum rate of a selected subset with Monte-Carlo E_se
inline double subset_rate(const ChannelSet& ch, const std::vector<int>& sel,
                          double p_snr, std::uint64_t samples, std::uint64_t seed) {
  if (sel.empty()) return 0.0;
  CMatrix h = subset_matrix(ch, sel);
  PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, p_snr};
  EseEstimate est = estimate_ese(cfg, samples, seed);
  return sum_rate_exact(est.mean, p_snr, static_cast<int>(sel.size()));
}

struct AlgStats {
  double rate = 0.0;
  double users = 0.0;
  double mults = 0.0;
};

struct SchedPoint {
  AlgStats grm;
  AlgStats sus;  // at the best alpha
  double best_alpha = 0.0;
  double es_rate = 0.0;  // only when with_es
};

// One SNR point of the scheduling experiments: GRM, the SUS alpha sweep
// (best alpha by mean sum rate), and optionally exhaustive search.
inline SchedPoint sched_point(const ExperimentConfig& cfg, double snr_db, bool with_es) {
  const double p = db_to_linear(snr_db);
  const auto alphas = alpha_grid_or_default(cfg);
  const std::uint64_t snr_tag = detail::mix64(static_cast<std::uint64_t>(snr_db * 64.0 + 1e6));

  SchedPoint pt;
  std::vector<double> sus_rate(alphas.size(), 0.0);
  std::vector<double> sus_users(alphas.size(), 0.0);
  std::vector<double> sus_mults(alphas.size(), 0.0);

  for (int t = 0; t < cfg.trials; ++t) {
    ChannelSet ch = draw_channel_set(cfg, static_cast<std::uint64_t>(t));
    std::uint64_t base = detail::mix64(cfg.seed ^ detail::mix64(t) ^ snr_tag);
    // rates within a trial are cached by selected set; different algorithms
    // frequently pick the same users
    std::map<std::vector<int>, double> cache;
    auto rate_of = [&](std::vector<int> sel) {
      std::sort(sel.begin(), sel.end());
      auto it = cache.find(sel);
      if (it != cache.end()) return it->second;
      std::uint64_t s = base + 0x9e37 * (cache.size() + 1);
      double r = subset_rate(ch, sel, p, cfg.ese_samples, s);
      cache.emplace(sel, r);
      return r;
    };

    SelectionTrace grm = grm_select(ch, p);
    pt.grm.rate += rate_of(grm.selected);
    pt.grm.users += static_cast<double>(grm.selected.size());
    pt.grm.mults += static_cast<double>(grm.vec_mults);

    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      SelectionTrace sus = sus_select(ch, p, alphas[ai]);
      sus_rate[ai] += rate_of(sus.selected);
      sus_users[ai] += static_cast<double>(sus.selected.size());
      sus_mults[ai] += static_cast<double>(sus.vec_mults);
    }
    if (with_es) {
      SelectionTrace es = exhaustive_select(ch, p, cfg.ese_samples, base + 0xe5);
      pt.es_rate += rate_of(es.selected);
    }
  }
  const double n = static_cast<double>(cfg.trials);
  pt.grm.rate /= n;
  pt.grm.users /= n;
  pt.grm.mults /= n;
  pt.es_rate /= n;
  std::size_t best = 0;
  for (std::size_t ai = 1; ai < alphas.size(); ++ai)
    if (sus_rate[ai] > sus_rate[best]) best = ai;
  pt.best_alpha = alphas[best];
  pt.sus.rate = sus_rate[best] / n;
  pt.sus.users = sus_users[best] / n;
  pt.sus.mults = sus_mults[best] / n;
  return pt;
}

inline ResultTable run_fig1(const ExperimentConfig& cfg) {
  ResultTable t;
  t.metadata = config_metadata(cfg);
  t.columns = {"lambda", "mi_exact", "mi_piecewise", "mi_awgn"};
  const double p = db_to_linear(cfg.snr_db_grid.front());
  for (int i = 1; i <= cfg.fig1_points; ++i) {
    double lam = 4.0 * i / cfg.fig1_points;
    t.rows.push_back({lam, mi_exact(lam, cfg.fig1_d, cfg.fig1_ese, p),
                      mi_piecewise(lam, cfg.fig1_d, cfg.fig1_ese, p),
                      mi_awgn(lam, cfg.fig1_d, cfg.fig1_ese, p)});
  }
  return t;
}

inline ResultTable run_sumrate_sweep(const ExperimentConfig& cfg) {
  ResultTable t;
  t.metadata = config_metadata(cfg);
  t.columns = {"snr_db", "vp_exact", "vp_ub_clamped", "vp_ub_raw", "vp_lb"};
  const int k = std::min(cfg.u, cfg.n_t);
  for (double snr_db : cfg.snr_db_grid) {
    const double p = db_to_linear(snr_db);
    double exact = 0.0, ub = 0.0, lb = 0.0, ubc = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(trial));
      CMatrix h = gen_channel(k, cfg.n_t, rng);
      PrecoderConfig pc{PrecoderMode::ChannelInverse, h, {}, p};
      std::uint64_t es = detail::mix64(cfg.seed ^ detail::mix64(trial));
      double ese = estimate_ese(pc, cfg.ese_samples, es).mean;
      exact += sum_rate_exact(ese, p, k);
      double u_raw = sum_rate_upper(h, p);
      ub += u_raw;
      ubc += std::max(0.0, u_raw);
      lb += sum_rate_lower(ese, p, k);
    }
    const double n = static_cast<double>(cfg.trials);
    t.rows.push_back({snr_db, exact / n, ubc / n, ub / n, lb / n});
  }
  return t;
}

inline ResultTable run_sched_loss(const ExperimentConfig& cfg) {
  ResultTable t;
  t.metadata = config_metadata(cfg);
  t.columns = {"snr_db", "es_rate", "grm_rate", "sus_rate",
               "sus_alpha", "grm_loss", "sus_loss"};
  for (double snr_db : cfg.snr_db_grid) {
    SchedPoint pt = sched_point(cfg, snr_db, true);
    t.rows.push_back({snr_db, pt.es_rate, pt.grm.rate, pt.sus.rate, pt.best_alpha,
                      pt.es_rate - pt.grm.rate, pt.es_rate - pt.sus.rate});
  }
  return t;
}

inline ResultTable run_sched_vs_users(const ExperimentConfig& cfg) {
  ResultTable t;
  t.metadata = config_metadata(cfg);
  t.columns = {"u", "snr_db", "grm_rate", "sus_rate", "grm_users", "sus_users"};
  for (int u = 2; u <= cfg.u; u += 2) {
    ExperimentConfig sub = cfg;
    sub.u = u;
    for (double snr_db : cfg.snr_db_grid) {
      SchedPoint pt = sched_point(sub, snr_db, false);
      t.rows.push_back({static_cast<double>(u), snr_db, pt.grm.rate, pt.sus.rate,
                        pt.grm.users, pt.sus.users});
    }
  }
  return t;
}

inline ResultTable run_tables(const ExperimentConfig& cfg, bool mults) {
  ResultTable t;
  t.metadata = config_metadata(cfg);
  t.columns = mults
      ? std::vector<std::string>{"snr_db", "grm_vec_mults", "sus_vec_mults", "sus_alpha"}
      : std::vector<std::string>{"snr_db", "grm_users", "sus_users", "sus_alpha"};
  for (double snr_db : cfg.snr_db_grid) {
    SchedPoint pt = sched_point(cfg, snr_db, false);
    if (mults)
      t.rows.push_back({snr_db, pt.grm.mults, pt.sus.mults, pt.best_alpha});
    else
      t.rows.push_back({snr_db, pt.grm.users, pt.sus.users, pt.best_alpha});
  }
  return t;
}

inline ResultTable run_ra_compare(const ExperimentConfig& cfg) {
  ResultTable t;
  t.metadata = config_metadata(cfg);
  t.columns = {"snr_db", "vp_plain", "vp_ra", "vp_grm", "vp_grm_ra"};
  const int k_full = std::min(cfg.u, cfg.n_t);

  auto ra_rate = [&](const CMatrix& h, double p, std::uint64_t seed) {
    AllocationResult ar = allocate(h, p, 50, 1e-6, cfg.ese_samples, seed);
    std::vector<int> act;
    for (Eigen::Index i = 0; i < ar.lambda.size(); ++i)
      if (ar.lambda(i) > 0.0) act.push_back(static_cast<int>(i));
    CMatrix h_act(act.size(), h.cols());
    RVector lam(act.size());
    for (std::size_t i = 0; i < act.size(); ++i) {
      h_act.row(i) = h.row(act[i]);
      lam(i) = ar.lambda(act[i]);
    }
    RVector d = dvq_decompose(h_act).d;
    return sum_rate_ra(ar.ese_final, p, lam, d);
  };

  for (double snr_db : cfg.snr_db_grid) {
    const double p = db_to_linear(snr_db);
    double plain = 0.0, ra = 0.0, grm_r = 0.0, grm_ra = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      ChannelSet ch = draw_channel_set(cfg, static_cast<std::uint64_t>(trial));
      std::uint64_t base =
          detail::mix64(cfg.seed ^ detail::mix64(trial) ^
                        detail::mix64(static_cast<std::uint64_t>(snr_db * 64.0 + 1e6)));
      std::vector<int> all(k_full);
      std::iota(all.begin(), all.end(), 0);
      plain += subset_rate(ch, all, p, cfg.ese_samples, base + 1);
      ra += ra_rate(subset_matrix(ch, all), p, base + 2);
      SelectionTrace grm = grm_select(ch, p);
      grm_r += subset_rate(ch, grm.selected, p, cfg.ese_samples, base + 3);
      grm_ra += ra_rate(subset_matrix(ch, grm.selected), p, base + 4);
    }
    const double n = static_cast<double>(cfg.trials);
    t.rows.push_back({snr_db, plain / n, ra / n, grm_r / n, grm_ra / n});
  }
  return t;
}

}  // namespace detail

inline ResultTable run(const ExperimentConfig& cfg) {
  detail::validate(cfg);
  ResultTable t;
  switch (cfg.experiment) {
    case Experiment::Fig1: t = detail::run_fig1(cfg); break;
    case Experiment::SumrateSweep: t = detail::run_sumrate_sweep(cfg); break;
    case Experiment::SchedLoss: t = detail::run_sched_loss(cfg); break;
    case Experiment::SchedVsUsers: t = detail::run_sched_vs_users(cfg); break;
    case Experiment::RaCompare: t = detail::run_ra_compare(cfg); break;
    case Experiment::TableUsers: t = detail::run_tables(cfg, false); break;
    case Experiment::TableMults: t = detail::run_tables(cfg, true); break;
  }
  if (!cfg.out_path.empty()) {
    std::ofstream os(cfg.out_path);
    if (!os) throw ConfigError("cannot open output file: " + cfg.out_path);
    write_csv(t, os);
  }
  return t;
}

}  // namespace vpp
