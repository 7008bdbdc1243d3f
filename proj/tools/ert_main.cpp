#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ert/deaths.hpp"
#include "ert/io.hpp"
#include "ert/sample_size.hpp"
#include "ert/simlab.hpp"

namespace fs = std::filesystem;
using ert::io::json;

namespace {

constexpr int kExitNotCrossed = 0;
constexpr int kExitError = 1;
constexpr int kExitCrossed = 10;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::vector<double> parse_grid(const std::string& text, double step) {
  std::vector<double> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const double lo = std::stod(text.substr(0, dots));
    const double hi = std::stod(text.substr(dots + 2));
    if (!(step > 0.0) || hi < lo) throw ert::ConfigError("bad range " + text);
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(std::round((lo + k * step) * 1e10) / 1e10);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw ert::ConfigError("empty list: " + text);
  return out;
}

std::vector<ert::BettingStrategy> parse_strategies(const std::string& text) {
  std::vector<ert::BettingStrategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(ert::BettingStrategy::parse(item));
  }
  if (out.empty()) throw ert::ConfigError("no strategies given");
  return out;
}

std::vector<ert::BettingStrategy> default_wage_strategies(ert::Variant v) {
  using ert::BettingStrategy;
  switch (v) {
    case ert::Variant::Survival:
      return {BettingStrategy::fixed(0.25), BettingStrategy::half_kelly(), BettingStrategy::full_kelly()};
    case ert::Variant::Continuous:
      return {BettingStrategy::doubly_adaptive(), BettingStrategy::sign_only(0.6)};
    case ert::Variant::Deaths:
      return {BettingStrategy::full_kelly(), BettingStrategy::half_kelly(), BettingStrategy::fixed(0.25)};
    default:
      return {BettingStrategy::half_kelly(), BettingStrategy::fixed(0.05), BettingStrategy::fixed(0.10)};
  }
}

// ---- monitor ----

struct MonitorArgs {
  std::string variant;
  double alpha = 0.05;
  std::optional<std::int64_t> burn_in, ramp;
  std::string strategy;
  double allocation = 0.5;
  double c_max = 0.6;
  std::int64_t n_trt = 0, n_ctrl = 0;
  std::string input = "-";
  std::string checkpoint;
  std::int64_t batch = 100;
  bool skip_processed = false;
  std::string report;
};

int run_monitor(const MonitorArgs& a) {
  ert::io::MonitorSettings s;
  s.variant = ert::parse_variant(a.variant);
  s.alpha = a.alpha;
  if (a.burn_in || a.ramp) {
    const auto def = ert::default_ramp(s.variant);
    s.ramp = ert::RampSchedule(a.burn_in.value_or(def.burn_in), a.ramp.value_or(def.ramp));
  }
  if (!a.strategy.empty()) s.strategy = ert::BettingStrategy::parse(a.strategy);
  s.allocation = a.allocation;
  s.c_max = a.c_max;
  s.n_trt = a.n_trt;
  s.n_ctrl = a.n_ctrl;
  if (a.batch < 1) throw ert::ConfigError("--batch must be >= 1");

  std::unique_ptr<ert::io::Monitor> mon;
  if (!a.checkpoint.empty() && fs::exists(a.checkpoint)) {
    std::ifstream in(a.checkpoint);
    json cp;
    try {
      cp = json::parse(in);
    } catch (const json::parse_error&) {
      throw ert::DataError("checkpoint is not valid JSON: " + a.checkpoint);
    }
    mon = ert::io::restore_monitor(s, cp);
    std::cerr << "resumed from " << a.checkpoint << " at event " << mon->events_processed() << "\n";
  } else {
    mon = ert::io::make_monitor(s);
  }

  auto save = [&] {
    if (!a.checkpoint.empty()) write_file_atomic(a.checkpoint, ert::io::make_checkpoint(*mon).dump(2) + "\n");
  };

  std::ifstream file;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    file.open(a.input);
    if (!file) throw ert::ConfigError("cannot open input: " + a.input);
    in = &file;
  }

  const bool was_crossed = mon->ledger().crossed();
  std::int64_t to_skip = a.skip_processed ? mon->events_processed() : 0;
  std::int64_t line_no = 0;
  std::int64_t since_save = 0;
  std::string line;
  try {
    while (std::getline(*in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (to_skip > 0) {
        --to_skip;
        continue;
      }
      const bool before = mon->ledger().crossed();
      const auto& step = mon->feed(ert::io::parse_event_line(line, line_no), line_no);
      if (!before && step.crossed) {
        std::cout << "CROSSED index=" << step.index << " e-value=" << step.wealth() << " at=" << utc_now() << std::endl;
      }
      if (++since_save >= a.batch) {
        save();
        since_save = 0;
      }
    }
  } catch (...) {
    save();
    throw;
  }
  if (to_skip > 0) throw ert::DataError("input has fewer records than the checkpoint already processed");
  save();

  const auto& ledger = mon->ledger();
  std::cout << "events=" << ledger.size() << " e-value=" << ledger.wealth() << " log-e=" << ledger.log_wealth()
            << " threshold=" << ledger.threshold();
  if (ledger.crossed()) {
    std::cout << " crossed=yes index=" << *ledger.crossed_at() << (was_crossed ? " (before resume)" : "");
  } else {
    std::cout << " crossed=no";
  }
  std::cout << "\n";
  if (!a.report.empty()) {
    json r = {{"schema_version", ert::io::kSchemaVersion},
              {"kind", "monitor"},
              {"variant", a.variant},
              {"config_hash", s.config_hash()},
              {"events_processed", ledger.size()},
              {"e_value", ledger.wealth()},
              {"log_wealth", ledger.log_wealth()},
              {"threshold", ledger.threshold()},
              {"crossed_at", ledger.crossed_at() ? json(*ledger.crossed_at()) : json(nullptr)}};
    auto out = open_out(a.report);
    out << r.dump(2) << "\n";
  }
  return ledger.crossed() ? kExitCrossed : kExitNotCrossed;
}

// ---- simulate / trajectories ----

struct SimArgs {
  std::string scenario;
  std::optional<std::int64_t> n_sims;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string json_out;
};

ert::SimScenario load_with_overrides(const SimArgs& a) {
  auto s = ert::io::load_scenario(a.scenario);
  if (a.n_sims) s.n_sims = *a.n_sims;
  if (a.seed) s.seed = *a.seed;
  if (a.workers) s.workers = *a.workers;
  s.validate();
  return s;
}

int run_simulate(const SimArgs& a) {
  const auto s = load_with_overrides(a);
  const auto oc = ert::run_operating_characteristics(s);
  ert::io::write_oc_table(std::cout, s, oc);
  if (!a.json_out.empty()) {
    auto out = open_out(a.json_out);
    out << ert::io::report_json(s, oc).dump(2) << "\n";
  }
  return kExitNotCrossed;
}

int run_trajectories(const SimArgs& a, std::int64_t n_trials, const std::string& out_path, const std::string& svg) {
  const auto s = load_with_overrides(a);
  const auto paths = ert::simulate_trajectories(s, n_trials);
  {
    auto out = open_out(out_path);
    ert::io::write_trajectories_csv(out, paths);
  }
  if (!svg.empty()) {
    auto out = open_out(svg);
    const std::string title = s.name.empty() ? std::string(ert::variant_name(s.variant())) : s.name;
    ert::io::write_trajectories_svg(out, paths, s.alpha, title);
  }
  std::int64_t crossed = 0;
  for (const auto& p : paths) {
    if (std::any_of(p.begin(), p.end(), [](const ert::WealthStep& st) { return st.crossed; })) ++crossed;
  }
  std::cout << "trials=" << n_trials << " crossed=" << crossed << " csv=" << out_path << "\n";
  return kExitNotCrossed;
}

// ---- power ----

struct PowerArgs {
  std::string variant;
  std::optional<double> p1, p2, d, hr;
  double power = 0.8;
  double alpha = 0.05;
  double inflation = 2.5;
};

int run_power(const PowerArgs& a) {
  const auto v = ert::parse_variant(a.variant);
  auto need = [](const std::optional<double>& x, const char* flag) {
    if (!x) throw ert::ConfigError(std::string("missing ") + flag);
    return *x;
  };
  switch (v) {
    case ert::Variant::Binary:
      std::cout << "n=" << ert::size_two_proportion(need(a.p1, "--p1"), need(a.p2, "--p2"), a.power, a.alpha) << "\n";
      break;
    case ert::Variant::Deaths: {
      const double p1 = need(a.p1, "--p1"), p2 = need(a.p2, "--p2");
      const auto n_bin = ert::size_two_proportion(p1, p2, a.power, a.alpha);
      const auto n = ert::deaths_design_size(n_bin, a.inflation);
      std::cout << "n=" << n << "\nbinary_n=" << n_bin << "\nexpected_deaths=" << ert::expected_deaths(n, p1, p2)
                << "\ndeath_coin=" << ert::death_coin(p1, p2) << "\n";
      break;
    }
    case ert::Variant::Continuous:
      std::cout << "n=" << ert::size_t_test(need(a.d, "--d"), a.power, a.alpha) << "\n";
      break;
    case ert::Variant::Survival:
      std::cout << "events=" << ert::size_logrank(need(a.hr, "--hr"), a.power, a.alpha) << "\n";
      break;
    case ert::Variant::Multistate:
      throw ert::ConfigError("no sample-size formula for multistate");
  }
  return kExitNotCrossed;
}

// ---- compare / wage ----

struct TableOut {
  std::string csv;
  std::string json_out;
};

void emit(const TableOut& o, const std::function<void(std::ostream&)>& csv, const json& j) {
  if (o.csv.empty()) {
    csv(std::cout);
  } else {
    auto out = open_out(o.csv);
    csv(out);
  }
  if (!o.json_out.empty()) {
    auto out = open_out(o.json_out);
    out << j.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomization e-process monitoring and simulation"};
  app.require_subcommand(1);

  MonitorArgs mon;
  auto* cmd_mon = app.add_subcommand("monitor", "Monitor an NDJSON event stream");
  cmd_mon->add_option("--variant", mon.variant, "binary|deaths|continuous|survival|multistate")->required();
  cmd_mon->add_option("--alpha", mon.alpha, "Significance level (threshold 1/alpha)");
  cmd_mon->add_option("--burn-in", mon.burn_in, "Burn-in length");
  cmd_mon->add_option("--ramp", mon.ramp, "Ramp length");
  cmd_mon->add_option("--strategy", mon.strategy, "half-kelly, full-kelly, fixed:X, sign-only:C, doubly-adaptive");
  cmd_mon->add_option("--allocation", mon.allocation, "Treatment allocation probability (binary, continuous)");
  cmd_mon->add_option("--c-max", mon.c_max, "Maximum betting strength (continuous)");
  cmd_mon->add_option("--n-trt", mon.n_trt, "Randomized to treatment (survival)");
  cmd_mon->add_option("--n-ctrl", mon.n_ctrl, "Randomized to control (survival)");
  cmd_mon->add_option("--input", mon.input, "NDJSON file, '-' for stdin");
  cmd_mon->add_option("--checkpoint", mon.checkpoint, "Checkpoint file (resumed from if present)");
  cmd_mon->add_option("--batch", mon.batch, "Events between checkpoint writes");
  cmd_mon->add_flag("--skip-processed", mon.skip_processed, "Skip records already counted in the checkpoint");
  cmd_mon->add_option("--report", mon.report, "Write a JSON summary here");

  SimArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Operating characteristics of a scenario file");
  cmd_sim->add_option("scenario", sim.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  cmd_sim->add_option("--n-sims", sim.n_sims);
  cmd_sim->add_option("--seed", sim.seed);
  cmd_sim->add_option("--workers", sim.workers);
  cmd_sim->add_option("--json", sim.json_out, "Write the JSON report here");

  PowerArgs pw;
  auto* cmd_pow = app.add_subcommand("power", "Fixed-sample design sizes");
  cmd_pow->add_option("--variant", pw.variant)->required();
  cmd_pow->add_option("--p1", pw.p1, "Control event rate");
  cmd_pow->add_option("--p2", pw.p2, "Treatment event rate");
  cmd_pow->add_option("--d", pw.d, "Standardized effect");
  cmd_pow->add_option("--hr", pw.hr, "Target hazard ratio");
  cmd_pow->add_option("--power", pw.power);
  cmd_pow->add_option("--alpha", pw.alpha);
  cmd_pow->add_option("--inflation", pw.inflation, "Deaths-only size multiplier");

  ert::HeadToHeadConfig h2h;
  std::string baselines = "0.10..0.40";
  double step = 0.05;
  TableOut h2h_out;
  auto* cmd_cmp = app.add_subcommand("compare", "Deaths-only versus binary on the same trials");
  cmd_cmp->add_option("--arr", h2h.arr, "Absolute risk reduction");
  cmd_cmp->add_option("--baselines", baselines, "lo..hi or comma list");
  cmd_cmp->add_option("--step", step, "Grid step for lo..hi");
  cmd_cmp->add_option("--power", h2h.power, "Design power of the binary sizing");
  cmd_cmp->add_option("--n-sims", h2h.n_sims);
  cmd_cmp->add_option("--seed", h2h.seed);
  cmd_cmp->add_option("--workers", h2h.workers);
  cmd_cmp->add_option("--csv", h2h_out.csv);
  cmd_cmp->add_option("--json", h2h_out.json_out);

  ert::WageStudyConfig wage;
  std::string wage_variant, effects, strategies;
  std::optional<double> w_hr, w_arr, w_d;
  std::optional<std::int64_t> w_n;
  TableOut wage_out;
  auto* cmd_wage = app.add_subcommand("wage", "Betting-strategy comparison");
  cmd_wage->add_option("--variant", wage_variant)->required();
  cmd_wage->add_option("--effects", effects, "Effect grid (HR, ARR or d)");
  cmd_wage->add_option("--hr", w_hr);
  cmd_wage->add_option("--arr", w_arr);
  cmd_wage->add_option("--d", w_d);
  cmd_wage->add_option("--strategies", strategies, "Comma list; variant defaults otherwise");
  cmd_wage->add_option("--baseline", wage.baseline, "Control rate for binary and deaths");
  cmd_wage->add_option("--n", w_n, "Fixed sample size instead of design sizing");
  cmd_wage->add_option("--power", wage.design_power);
  cmd_wage->add_option("--n-sims", wage.n_sims);
  cmd_wage->add_option("--seed", wage.seed);
  cmd_wage->add_option("--workers", wage.workers);
  cmd_wage->add_option("--csv", wage_out.csv);
  cmd_wage->add_option("--json", wage_out.json_out);

  SimArgs traj;
  std::int64_t n_trials = 30;
  std::string traj_out, traj_svg;
  auto* cmd_traj = app.add_subcommand("trajectories", "Export simulated wealth paths");
  cmd_traj->add_option("scenario", traj.scenario)->required()->check(CLI::ExistingFile);
  cmd_traj->add_option("--n-trials", n_trials);
  cmd_traj->add_option("--seed", traj.seed);
  cmd_traj->add_option("--out", traj_out, "CSV path")->required();
  cmd_traj->add_option("--svg", traj_svg, "Optional SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*cmd_mon) return run_monitor(mon);
    if (*cmd_sim) return run_simulate(sim);
    if (*cmd_pow) return run_power(pw);
    if (*cmd_cmp) {
      h2h.baselines = parse_grid(baselines, step);
      const auto rows = ert::head_to_head_deaths_vs_binary(h2h);
      emit(h2h_out, [&](std::ostream& os) { ert::io::write_head_to_head_csv(os, rows); },
           ert::io::head_to_head_json(h2h, rows));
      return kExitNotCrossed;
    }
    if (*cmd_wage) {
      wage.variant = ert::parse_variant(wage_variant);
      if (!effects.empty()) {
        wage.effects = parse_grid(effects, 0.05);
      } else if (w_hr) {
        wage.effects = {*w_hr};
      } else if (w_arr) {
        wage.effects = {*w_arr};
      } else if (w_d) {
        wage.effects = {*w_d};
      } else {
        throw ert::ConfigError("give --effects or one of --hr/--arr/--d");
      }
      wage.strategies = strategies.empty() ? default_wage_strategies(wage.variant) : parse_strategies(strategies);
      wage.n_override = w_n;
      const auto cells = ert::wage_study(wage);
      emit(wage_out, [&](std::ostream& os) { ert::io::write_wage_csv(os, wage.variant, cells); },
           ert::io::wage_json(wage, cells));
      return kExitNotCrossed;
    }
    if (*cmd_traj) return run_trajectories(traj, n_trials, traj_out, traj_svg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
