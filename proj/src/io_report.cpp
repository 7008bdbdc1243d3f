#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ert/deaths.hpp"
#include "ert/io.hpp"
#include "ert/sample_size.hpp"

namespace ert::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* kScenario = "scenario: ";

TransitionMatrix matrix_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != kStateCount) throw ConfigError(kScenario + key + " must be a 4x4 array");
  std::array<TransitionMatrix::Row, kStateCount> rows{};
  for (std::size_t r = 0; r < kStateCount; ++r) {
    if (!j[r].is_array() || j[r].size() != kStateCount) throw ConfigError(kScenario + key + " must be a 4x4 array");
    for (std::size_t c = 0; c < kStateCount; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(kScenario + key + " entries must be numbers");
      rows[r][c] = j[r][c].get<double>();
    }
  }
  return TransitionMatrix(rows);
}

json matrix_to_json(const TransitionMatrix& m) {
  json rows = json::array();
  for (const auto& row : m.rows()) rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  return rows;
}

struct Design {
  std::optional<double> p_ctrl, p_trt, d, hr;
  double power = 0.8;
  double inflation = 1.0;
};

Design read_design(const json* j, Variant v) {
  Design d;
  if (!j) return d;
  StrictObject o(*j, "scenario design: ", false);
  d.power = o.opt_number("power").value_or(0.8);
  switch (v) {
    case Variant::Binary:
      d.p_ctrl = o.number("p_ctrl");
      d.p_trt = o.number("p_trt");
      break;
    case Variant::Deaths:
      d.p_ctrl = o.number("p_ctrl");
      d.p_trt = o.number("p_trt");
      d.inflation = o.opt_number("inflation").value_or(1.0);
      break;
    case Variant::Continuous: d.d = o.number("d"); break;
    case Variant::Survival: d.hr = o.number("hr"); break;
    case Variant::Multistate: o.fail("multistate scenarios take n_patients directly");
  }
  o.finish();
  return d;
}

std::int64_t sized(std::optional<std::int64_t> n, const json* design_json, const Design& d, Variant v, double alpha) {
  if (n) return *n;
  if (!design_json) throw ConfigError("scenario: n_patients missing and no design block to size it");
  switch (v) {
    case Variant::Binary: return size_two_proportion(*d.p_ctrl, *d.p_trt, d.power, alpha);
    case Variant::Deaths: {
      const auto base = size_two_proportion(*d.p_ctrl, *d.p_trt, d.power, alpha);
      return d.inflation == 1.0 ? base : deaths_design_size(base, d.inflation);
    }
    case Variant::Continuous: return size_t_test(*d.d, d.power, alpha);
    case Variant::Survival: return size_logrank(*d.hr, d.power, alpha);
    case Variant::Multistate: break;
  }
  throw ConfigError("scenario: n_patients missing");
}

std::string fmt(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string fmt_g(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

SimScenario scenario_from_json(const json& j) {
  StrictObject o(j, kScenario, false);
  SimScenario s;
  s.name = o.opt_text("name").value_or("");
  const Variant v = parse_variant(o.text("variant"));
  s.n_sims = o.opt_integer("n_sims").value_or(2000);
  s.seed = static_cast<std::uint64_t>(o.opt_integer("seed").value_or(1));
  s.alpha = o.opt_number("alpha").value_or(0.05);
  const auto workers = o.opt_integer("workers").value_or(0);
  if (workers < 0) o.fail("workers must be >= 0");
  s.workers = static_cast<unsigned>(workers);
  const auto burn = o.opt_integer("burn_in");
  const auto ramp = o.opt_integer("ramp");
  if (burn || ramp) {
    const RampSchedule def = default_ramp(v);
    s.ramp = RampSchedule(burn.value_or(def.burn_in), ramp.value_or(def.ramp));
  }
  if (const auto st = o.opt_text("strategy")) s.strategy = BettingStrategy::parse(*st);
  const json* design_json = o.has("design") ? &o.at("design") : nullptr;
  const Design design = read_design(design_json, v);
  StrictObject p(o.at("params"), "scenario params: ", false);
  o.finish();

  switch (v) {
    case Variant::Binary: {
      BinaryScenario b;
      b.p_ctrl = p.number("p_ctrl");
      b.p_trt = p.number("p_trt");
      b.allocation = p.opt_number("allocation").value_or(0.5);
      b.n_patients = sized(p.opt_integer("n_patients"), design_json, design, v, s.alpha);
      s.params = b;
      break;
    }
    case Variant::Deaths: {
      if (p.has("coin")) {
        DeathsScenario d;
        d.coin = p.number("coin");
        d.n_deaths = p.integer("n_deaths");
        s.params = d;
      } else {
        const double pc = p.number("p_ctrl");
        const double pt = p.number("p_trt");
        const auto n = sized(p.opt_integer("n_patients"), design_json, design, v, s.alpha);
        DeathsScenario d = DeathsScenario::from_rates(pc, pt, n);
        if (const auto nd = p.opt_integer("n_deaths")) d.n_deaths = *nd;
        s.params = d;
      }
      break;
    }
    case Variant::Continuous: {
      ContinuousScenario c;
      c.mu_ctrl = p.opt_number("mu_ctrl").value_or(0.0);
      c.mu_trt = p.opt_number("mu_trt").value_or(0.0);
      c.sd = p.opt_number("sd").value_or(1.0);
      c.allocation = p.opt_number("allocation").value_or(0.5);
      c.c_max = p.opt_number("c_max").value_or(0.6);
      c.n_patients = sized(p.opt_integer("n_patients"), design_json, design, v, s.alpha);
      s.params = c;
      break;
    }
    case Variant::Survival: {
      SurvivalScenario sv;
      sv.hr = p.opt_number("hr").value_or(1.0);
      sv.shape = p.opt_number("shape").value_or(1.2);
      sv.scale = p.opt_number("scale").value_or(10.0);
      sv.cens_prop = p.opt_number("cens_prop").value_or(0.0);
      sv.recruit_period = p.opt_number("recruit_period").value_or(0.0);
      sv.n_patients = sized(p.opt_integer("n_patients"), design_json, design, v, s.alpha);
      s.params = sv;
      break;
    }
    case Variant::Multistate: {
      MultistateScenario m;
      m.n_patients = p.integer("n_patients");
      m.horizon = static_cast<int>(p.opt_integer("horizon").value_or(28));
      if (const auto st = p.opt_text("start")) m.start = parse_state(*st);
      if (p.has("ctrl")) m.ctrl = matrix_from_json(p.at("ctrl"), "ctrl");
      if (p.has("trt")) m.trt = matrix_from_json(p.at("trt"), "trt");
      s.params = m;
      break;
    }
  }
  p.finish();
  s.validate();
  return s;
}

SimScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error&) {
    throw ConfigError("scenario file is not valid JSON: " + path);
  }
  return scenario_from_json(j);
}

json scenario_to_json(const SimScenario& s) {
  const Variant v = s.variant();
  const RampSchedule r = s.ramp.value_or(default_ramp(v));
  json j;
  j["name"] = s.name;
  j["variant"] = std::string(variant_name(v));
  j["n_sims"] = s.n_sims;
  j["seed"] = s.seed;
  j["alpha"] = s.alpha;
  j["burn_in"] = r.burn_in;
  j["ramp"] = r.ramp;
  j["strategy"] = s.strategy.value_or(default_strategy(v)).to_string();
  j["params"] = std::visit(
      overloaded{
          [](const BinaryScenario& b) {
            return json{{"p_ctrl", b.p_ctrl}, {"p_trt", b.p_trt}, {"n_patients", b.n_patients}, {"allocation", b.allocation}};
          },
          [](const DeathsScenario& d) { return json{{"coin", d.coin}, {"n_deaths", d.n_deaths}}; },
          [](const ContinuousScenario& c) {
            return json{{"mu_ctrl", c.mu_ctrl}, {"mu_trt", c.mu_trt},         {"sd", c.sd},
                        {"n_patients", c.n_patients}, {"allocation", c.allocation}, {"c_max", c.c_max}};
          },
          [](const SurvivalScenario& v) {
            return json{{"hr", v.hr},
                        {"shape", v.shape},
                        {"scale", v.scale},
                        {"cens_prop", v.cens_prop},
                        {"n_patients", v.n_patients},
                        {"recruit_period", v.recruit_period}};
          },
          [](const MultistateScenario& m) {
            return json{{"n_patients", m.n_patients},
                        {"horizon", m.horizon},
                        {"start", std::string(state_name(m.start))},
                        {"ctrl", matrix_to_json(m.ctrl)},
                        {"trt", matrix_to_json(m.trt)}};
          },
      },
      s.params);
  return j;
}

json oc_to_json(const OperatingCharacteristics& oc) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"n_sims", oc.n_sims},
          {"rejections", oc.rejections},
          {"rejection_rate", oc.rejection_rate},
          {"standard_error", oc.standard_error},
          {"median_first_crossing", opt(oc.median_first_crossing)},
          {"crossing_fraction", opt(oc.crossing_fraction)},
          {"median_stream_length", oc.median_stream_length},
          {"final_e_quantiles",
           {{"q10", oc.e_q10}, {"q25", oc.e_q25}, {"median", oc.e_median}, {"q75", oc.e_q75}, {"q90", oc.e_q90}}}};
}

json report_json(const SimScenario& s, const OperatingCharacteristics& oc) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "operating_characteristics"},
          {"scenario", scenario_to_json(s)},
          {"results", oc_to_json(oc)}};
}

void write_oc_table(std::ostream& os, const SimScenario& s, const OperatingCharacteristics& oc) {
  const std::string title = s.name.empty() ? std::string(variant_name(s.variant())) : s.name;
  os << title << " (" << oc.n_sims << " sims, seed " << s.seed << ")\n";
  os << "  rejection rate   " << fmt(oc.rejection_rate, 4) << "  (SE " << fmt(oc.standard_error, 4) << ")\n";
  os << "  median crossing  ";
  if (oc.median_first_crossing) {
    os << fmt(*oc.median_first_crossing, 1);
    if (oc.crossing_fraction) os << " (" << fmt(100.0 * *oc.crossing_fraction, 0) << "%)";
  } else {
    os << "-";
  }
  os << "\n  stream length    " << fmt(oc.median_stream_length, 0) << " (median)\n";
  os << "  final e-value    q10 " << fmt_g(oc.e_q10) << "  q25 " << fmt_g(oc.e_q25) << "  median " << fmt_g(oc.e_median)
     << "  q75 " << fmt_g(oc.e_q75) << "  q90 " << fmt_g(oc.e_q90) << "\n";
}

void write_head_to_head_csv(std::ostream& os, const std::vector<HeadToHeadRow>& rows) {
  os << "baseline,p_trt,death_coin,n_patients,expected_deaths,binary_power,deaths_power,delta,winner\n";
  for (const auto& r : rows) {
    os << fmt(r.baseline, 4) << ',' << fmt(r.p_trt, 4) << ',' << fmt(r.coin, 4) << ',' << r.n_patients << ','
       << r.expected_deaths << ',' << fmt(r.binary_power, 4) << ',' << fmt(r.deaths_power, 4) << ','
       << fmt(r.delta, 4) << ',' << r.winner << '\n';
  }
}

json head_to_head_json(const HeadToHeadConfig& cfg, const std::vector<HeadToHeadRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"baseline", r.baseline},
                   {"p_trt", r.p_trt},
                   {"death_coin", r.coin},
                   {"n_patients", r.n_patients},
                   {"expected_deaths", r.expected_deaths},
                   {"binary_power", r.binary_power},
                   {"deaths_power", r.deaths_power},
                   {"delta", r.delta},
                   {"winner", r.winner}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "head_to_head"},
          {"arr", cfg.arr},
          {"power", cfg.power},
          {"n_sims", cfg.n_sims},
          {"seed", cfg.seed},
          {"rows", out}};
}

void write_wage_csv(std::ostream& os, Variant v, const std::vector<WageCell>& cells) {
  os << "variant,strategy,effect,n,power,standard_error,median_final_e\n";
  for (const auto& c : cells) {
    os << variant_name(v) << ',' << c.strategy.to_string() << ',' << fmt(c.effect, 4) << ',' << c.n << ','
       << fmt(c.oc.rejection_rate, 4) << ',' << fmt(c.oc.standard_error, 4) << ',' << fmt_g(c.oc.e_median) << '\n';
  }
}

json wage_json(const WageStudyConfig& cfg, const std::vector<WageCell>& cells) {
  json out = json::array();
  for (const auto& c : cells) {
    out.push_back({{"strategy", c.strategy.to_string()}, {"effect", c.effect}, {"n", c.n}, {"results", oc_to_json(c.oc)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "wage_study"},
          {"variant", std::string(variant_name(cfg.variant))},
          {"n_sims", cfg.n_sims},
          {"seed", cfg.seed},
          {"cells", out}};
}

void write_trajectories_csv(std::ostream& os, const std::vector<std::vector<WealthStep>>& paths) {
  os << "trial,index,lambda,multiplier,wealth\n";
  os << std::setprecision(10);
  for (std::size_t t = 0; t < paths.size(); ++t) {
    for (const auto& s : paths[t]) {
      os << t + 1 << ',' << s.index << ',' << s.lambda << ',' << s.multiplier << ',' << s.wealth() << '\n';
    }
  }
}

void write_trajectories_svg(std::ostream& os, const std::vector<std::vector<WealthStep>>& paths, double alpha,
                            const std::string& title) {
  constexpr double W = 720, H = 420, L = 60, R = 20, T = 36, B = 44;
  std::size_t max_len = 1;
  double lo = std::log10(alpha), hi = std::log10(1.0 / alpha);
  for (const auto& p : paths) {
    max_len = std::max(max_len, p.size());
    for (const auto& s : p) {
      const double l = s.log_wealth / std::log(10.0);
      if (std::isfinite(l)) {
        lo = std::min(lo, l);
        hi = std::max(hi, l);
      }
    }
  }
  lo = std::floor(std::max(lo, -12.0));
  hi = std::ceil(std::min(hi, 12.0));
  auto x = [&](double i) { return L + (W - L - R) * i / static_cast<double>(max_len); };
  auto y = [&](double l10) { return T + (H - T - B) * (hi - std::clamp(l10, lo, hi)) / (hi - lo); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  for (double d = lo; d <= hi; d += 1.0) {
    os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << y(d) << "\" y2=\"" << y(d)
       << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << y(d) + 4 << "\" text-anchor=\"end\">1e" << static_cast<int>(d)
       << "</text>\n";
  }
  os << std::setprecision(6);
  for (const auto& p : paths) {
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-opacity=\"0.6\" stroke-width=\"1\" points=\"" << x(0)
       << ',' << y(0.0);
    for (const auto& s : p) os << ' ' << x(static_cast<double>(s.index)) << ',' << y(s.log_wealth / std::log(10.0));
    os << "\"/>\n";
  }
  const double thr = y(std::log10(1.0 / alpha));
  os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << thr << "\" y2=\"" << thr
     << "\" stroke=\"crimson\" stroke-dasharray=\"6,4\"/>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << thr - 4 << "\" text-anchor=\"end\" fill=\"crimson\">1/alpha = "
     << fmt_g(1.0 / alpha) << "</text>\n";
  os << "<line x1=\"" << L << "\" x2=\"" << L << "\" y1=\"" << T << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << H - B << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">observation</text>\n";
  os << "<text x=\"" << x(static_cast<double>(max_len)) << "\" y=\"" << H - B + 14 << "\" text-anchor=\"end\">"
     << max_len << "</text>\n";
  os << "</svg>\n";
}

}  // namespace ert::io
