#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "ert/binary.hpp"
#include "ert/continuous.hpp"
#include "ert/deaths.hpp"
#include "ert/io.hpp"
#include "ert/survival.hpp"

namespace ert::io {

StrictObject::StrictObject(const json& j, std::string error_prefix, bool data_error)
    : j_(j), prefix_(std::move(error_prefix)), data_error_(data_error) {
  if (!j_.is_object()) fail("expected a JSON object");
}

void StrictObject::fail(const std::string& msg) const {
  if (data_error_) throw DataError(prefix_ + msg);
  throw ConfigError(prefix_ + msg);
}

bool StrictObject::has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

const json& StrictObject::at(const std::string& key) {
  if (!j_.contains(key)) fail("missing field '" + key + "'");
  if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) seen_.push_back(key);
  return j_.at(key);
}

double StrictObject::number(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number()) fail("field '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail("field '" + key + "' must be finite");
  return d;
}

std::int64_t StrictObject::integer(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number_integer()) fail("field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string StrictObject::text(const std::string& key) {
  const json& v = at(key);
  if (!v.is_string()) fail("field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<double> StrictObject::opt_number(const std::string& key) {
  if (!j_.contains(key)) return std::nullopt;
  if (j_.at(key).is_null()) {
    at(key);
    return std::nullopt;
  }
  return number(key);
}

std::optional<std::int64_t> StrictObject::opt_integer(const std::string& key) {
  if (!j_.contains(key)) return std::nullopt;
  if (j_.at(key).is_null()) {
    at(key);
    return std::nullopt;
  }
  return integer(key);
}

std::optional<std::string> StrictObject::opt_text(const std::string& key) {
  if (!j_.contains(key)) return std::nullopt;
  return text(key);
}

void StrictObject::finish() const {
  for (const auto& [key, _] : j_.items()) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) fail("unknown field '" + key + "'");
  }
}

std::string double_bits(double v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

double double_from_bits(const std::string& hex) {
  std::uint64_t bits = 0;
  const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), bits, 16);
  if (hex.size() != 16 || ec != std::errc() || ptr != hex.data() + hex.size()) {
    throw DataError("malformed double bits: " + hex);
  }
  return std::bit_cast<double>(bits);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void MonitorSettings::validate() const {
  validate_alpha(alpha);
  switch (variant) {
    case Variant::Binary: {
      BinaryConfig cfg;
      cfg.p = allocation;
      cfg.alpha = alpha;
      cfg.ramp = ramp.value_or(default_ramp(variant));
      cfg.strategy = strategy.value_or(default_strategy(variant));
      cfg.validate();
      break;
    }
    case Variant::Continuous: {
      ContinuousConfig cfg;
      cfg.p = allocation;
      cfg.c_max = c_max;
      cfg.alpha = alpha;
      cfg.ramp = ramp.value_or(default_ramp(variant));
      cfg.strategy = strategy.value_or(default_strategy(variant));
      cfg.validate();
      break;
    }
    case Variant::Survival:
      if (n_trt < 0 || n_ctrl < 0) throw ConfigError("risk set sizes must be >= 0");
      if (n_trt + n_ctrl == 0) throw ConfigError("survival monitoring needs --n-trt and --n-ctrl");
      break;
    default:
      break;
  }
}

json MonitorSettings::to_json() const {
  const RampSchedule r = ramp.value_or(default_ramp(variant));
  json j;
  j["variant"] = std::string(variant_name(variant));
  j["alpha"] = double_bits(alpha);
  j["burn_in"] = r.burn_in;
  j["ramp"] = r.ramp;
  j["strategy"] = strategy.value_or(default_strategy(variant)).to_string();
  if (variant == Variant::Binary || variant == Variant::Continuous) j["allocation"] = double_bits(allocation);
  if (variant == Variant::Continuous) j["c_max"] = double_bits(c_max);
  if (variant == Variant::Survival) {
    j["n_trt"] = n_trt;
    j["n_ctrl"] = n_ctrl;
  }
  return j;
}

std::string MonitorSettings::config_hash() const { return fnv1a_hex(to_json().dump()); }

json ledger_to_json(const WealthLedger::Snapshot& snap) {
  json j;
  j["alpha_bits"] = double_bits(snap.alpha);
  j["count"] = snap.count;
  j["log_wealth"] = snap.log_wealth;
  j["log_wealth_bits"] = double_bits(snap.log_wealth);
  j["max_log_wealth_bits"] = double_bits(snap.max_log_wealth);
  j["crossed_at"] = snap.crossed_at ? json(*snap.crossed_at) : json(nullptr);
  if (snap.last) {
    const WealthStep& s = *snap.last;
    j["last"] = {{"index", s.index},
                 {"lambda_bits", double_bits(s.lambda)},
                 {"multiplier_bits", double_bits(s.multiplier)},
                 {"log_wealth_bits", double_bits(s.log_wealth)},
                 {"crossed", s.crossed}};
  } else {
    j["last"] = nullptr;
  }
  return j;
}

WealthLedger::Snapshot ledger_from_json(const json& j) {
  StrictObject o(j, "checkpoint ledger: ", true);
  WealthLedger::Snapshot snap;
  snap.alpha = double_from_bits(o.text("alpha_bits"));
  snap.count = o.integer("count");
  o.at("log_wealth");
  snap.log_wealth = double_from_bits(o.text("log_wealth_bits"));
  snap.max_log_wealth = double_from_bits(o.text("max_log_wealth_bits"));
  snap.crossed_at = o.opt_integer("crossed_at");
  const json& last = o.at("last");
  if (!last.is_null()) {
    StrictObject l(last, "checkpoint ledger.last: ", true);
    WealthStep s;
    s.index = l.integer("index");
    s.lambda = double_from_bits(l.text("lambda_bits"));
    s.multiplier = double_from_bits(l.text("multiplier_bits"));
    s.log_wealth = double_from_bits(l.text("log_wealth_bits"));
    const json& crossed = l.at("crossed");
    if (!crossed.is_boolean()) l.fail("field 'crossed' must be a boolean");
    s.crossed = crossed.get<bool>();
    l.finish();
    snap.last = s;
  }
  o.finish();
  return snap;
}

json parse_event_line(const std::string& text, std::int64_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("line " + std::to_string(line) + ": malformed JSON");
  }
}

namespace {

std::string line_prefix(std::int64_t line) { return "line " + std::to_string(line) + ": "; }

Arm read_arm(StrictObject& o) {
  const std::int64_t a = o.integer("arm");
  if (a != 0 && a != 1) o.fail("arm must be 0 or 1");
  return a == 1 ? Arm::Treatment : Arm::Control;
}

int read_flag(StrictObject& o, const std::string& key) {
  const std::int64_t v = o.integer(key);
  if (v != 0 && v != 1) o.fail(key + " must be 0 or 1");
  return static_cast<int>(v);
}

State read_state(StrictObject& o, const std::string& key) {
  const json& v = o.at(key);
  try {
    if (v.is_string()) return parse_state(v.get<std::string>());
    if (v.is_number_integer()) return parse_state(std::to_string(v.get<std::int64_t>()));
  } catch (const DataError&) {
    o.fail("unknown state in '" + key + "'");
  }
  o.fail("field '" + key + "' must be a state name or number");
}

template <class Fn>
const WealthStep& with_line(std::int64_t line, Fn&& fn) {
  try {
    return fn();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    if (msg.rfind("line ", 0) == 0) throw;
    throw DataError(line_prefix(line) + msg);
  }
}

json counts_pair(std::int64_t a, std::int64_t b, const char* ka, const char* kb) { return {{ka, a}, {kb, b}}; }

class BinaryAdapter final : public Monitor {
 public:
  BinaryAdapter(const MonitorSettings& s, BinaryCounts counts, WealthLedger ledger)
      : Monitor(s), mon_(config(s), counts, std::move(ledger)) {}

  static BinaryConfig config(const MonitorSettings& s) {
    BinaryConfig cfg;
    cfg.p = s.allocation;
    cfg.alpha = s.alpha;
    cfg.ramp = s.ramp.value_or(default_ramp(Variant::Binary));
    cfg.strategy = s.strategy.value_or(default_strategy(Variant::Binary));
    return cfg;
  }

  const WealthStep& feed(const json& record, std::int64_t line) override {
    return with_line(line, [&]() -> const WealthStep& {
      StrictObject o(record, line_prefix(line), true);
      const Arm arm = read_arm(o);
      const int outcome = read_flag(o, "outcome");
      o.finish();
      return mon_.step(outcome, arm);
    });
  }
  const WealthLedger& ledger() const override { return mon_.ledger(); }
  std::int64_t state_events() const override { return mon_.next_index() - 1; }
  json state() const override {
    const auto& c = mon_.counts();
    return {{"n_trt", c.n_trt}, {"n_ctrl", c.n_ctrl}, {"e_trt", c.e_trt}, {"e_ctrl", c.e_ctrl}};
  }
  static BinaryCounts counts_from(const json& j) {
    StrictObject o(j, "checkpoint state: ", true);
    BinaryCounts c;
    c.n_trt = o.integer("n_trt");
    c.n_ctrl = o.integer("n_ctrl");
    c.e_trt = o.integer("e_trt");
    c.e_ctrl = o.integer("e_ctrl");
    o.finish();
    return c;
  }

 private:
  BinaryMonitor mon_;
};

class DeathsAdapter final : public Monitor {
 public:
  DeathsAdapter(const MonitorSettings& s, DeathCounts counts, WealthLedger ledger)
      : Monitor(s), mon_(config(s), counts, std::move(ledger)) {}

  static DeathsConfig config(const MonitorSettings& s) {
    DeathsConfig cfg;
    cfg.alpha = s.alpha;
    cfg.ramp = s.ramp.value_or(default_ramp(Variant::Deaths));
    cfg.strategy = s.strategy.value_or(default_strategy(Variant::Deaths));
    return cfg;
  }

  const WealthStep& feed(const json& record, std::int64_t line) override {
    return with_line(line, [&]() -> const WealthStep& {
      StrictObject o(record, line_prefix(line), true);
      const Arm arm = read_arm(o);
      o.finish();
      return mon_.step(arm);
    });
  }
  const WealthLedger& ledger() const override { return mon_.ledger(); }
  std::int64_t state_events() const override { return mon_.next_index() - 1; }
  json state() const override { return counts_pair(mon_.counts().d_trt, mon_.counts().d_ctrl, "d_trt", "d_ctrl"); }
  static DeathCounts counts_from(const json& j) {
    StrictObject o(j, "checkpoint state: ", true);
    DeathCounts c;
    c.d_trt = o.integer("d_trt");
    c.d_ctrl = o.integer("d_ctrl");
    o.finish();
    return c;
  }

 private:
  DeathsMonitor mon_;
};

class ContinuousAdapter final : public Monitor {
 public:
  ContinuousAdapter(const MonitorSettings& s, std::span<const ContinuousMonitor::Observation> past, WealthLedger ledger)
      : Monitor(s), mon_(config(s), past, std::move(ledger)) {}

  static ContinuousConfig config(const MonitorSettings& s) {
    ContinuousConfig cfg;
    cfg.p = s.allocation;
    cfg.c_max = s.c_max;
    cfg.alpha = s.alpha;
    cfg.ramp = s.ramp.value_or(default_ramp(Variant::Continuous));
    cfg.strategy = s.strategy.value_or(default_strategy(Variant::Continuous));
    return cfg;
  }

  const WealthStep& feed(const json& record, std::int64_t line) override {
    return with_line(line, [&]() -> const WealthStep& {
      StrictObject o(record, line_prefix(line), true);
      const Arm arm = read_arm(o);
      const double y = o.number("y");
      o.finish();
      return mon_.step(y, arm);
    });
  }
  const WealthLedger& ledger() const override { return mon_.ledger(); }
  std::int64_t state_events() const override { return mon_.next_index() - 1; }
  json state() const override {
    json ys = json::array();
    json arms = json::array();
    for (const auto& ob : mon_.observations()) {
      ys.push_back(double_bits(ob.y));
      arms.push_back(to_int(ob.arm));
    }
    return {{"y_bits", ys}, {"arm", arms}};
  }
  static std::vector<ContinuousMonitor::Observation> history_from(const json& j) {
    StrictObject o(j, "checkpoint state: ", true);
    const json& ys = o.at("y_bits");
    const json& arms = o.at("arm");
    o.finish();
    if (!ys.is_array() || !arms.is_array() || ys.size() != arms.size()) o.fail("history arrays malformed");
    std::vector<ContinuousMonitor::Observation> past;
    past.reserve(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
      if (!ys[k].is_string() || !arms[k].is_number_integer()) o.fail("history arrays malformed");
      past.push_back({double_from_bits(ys[k].get<std::string>()), arm_from_int(arms[k].get<std::int64_t>())});
    }
    return past;
  }

 private:
  ContinuousMonitor mon_;
};

class SurvivalAdapter final : public Monitor {
 public:
  SurvivalAdapter(const MonitorSettings& s, SurvivalScore score, WealthLedger ledger)
      : Monitor(s), mon_(config(s), score, std::move(ledger)) {}

  static SurvivalConfig config(const MonitorSettings& s) {
    SurvivalConfig cfg;
    cfg.alpha = s.alpha;
    cfg.ramp = s.ramp.value_or(default_ramp(Variant::Survival));
    cfg.strategy = s.strategy.value_or(default_strategy(Variant::Survival));
    return cfg;
  }

  const WealthStep& feed(const json& record, std::int64_t line) override {
    return with_line(line, [&]() -> const WealthStep& {
      StrictObject o(record, line_prefix(line), true);
      SurvivalRecord r;
      r.time = o.number("time");
      r.status = read_flag(o, "status");
      r.arm = read_arm(o);
      if (const auto entry = o.opt_number("entry_time")) {
        r.time -= *entry;
        if (r.time < 0.0) o.fail("negative study time");
      }
      o.finish();
      return mon_.step(r);
    });
  }
  const WealthLedger& ledger() const override { return mon_.ledger(); }
  std::int64_t state_events() const override { return mon_.next_index() - 1; }
  json state() const override {
    const auto& sc = mon_.score();
    return {{"risk_trt", sc.risk_trt},
            {"risk_ctrl", sc.risk_ctrl},
            {"cum_z_bits", double_bits(sc.cum_z)},
            {"cum_v_bits", double_bits(sc.cum_v)},
            {"processed", sc.processed},
            {"last_time_bits", double_bits(sc.last_time)}};
  }
  static SurvivalScore score_from(const json& j) {
    StrictObject o(j, "checkpoint state: ", true);
    SurvivalScore sc;
    sc.risk_trt = o.integer("risk_trt");
    sc.risk_ctrl = o.integer("risk_ctrl");
    sc.cum_z = double_from_bits(o.text("cum_z_bits"));
    sc.cum_v = double_from_bits(o.text("cum_v_bits"));
    sc.processed = o.integer("processed");
    sc.last_time = double_from_bits(o.text("last_time_bits"));
    o.finish();
    return sc;
  }

 private:
  SurvivalMonitor mon_;
};

class MultistateAdapter final : public Monitor {
 public:
  MultistateAdapter(const MonitorSettings& s, TransitionCounts counts, WealthLedger ledger)
      : Monitor(s), mon_(config(s), counts, std::move(ledger)) {}

  static MultistateConfig config(const MonitorSettings& s) {
    MultistateConfig cfg;
    cfg.alpha = s.alpha;
    cfg.ramp = s.ramp.value_or(default_ramp(Variant::Multistate));
    cfg.strategy = s.strategy.value_or(default_strategy(Variant::Multistate));
    return cfg;
  }

  const WealthStep& feed(const json& record, std::int64_t line) override {
    return with_line(line, [&]() -> const WealthStep& {
      StrictObject o(record, line_prefix(line), true);
      const State from = read_state(o, "from");
      const State to = read_state(o, "to");
      const Arm arm = read_arm(o);
      if (const auto day = o.opt_integer("day"); day && *day < 0) o.fail("day must be >= 0");
      o.finish();
      return mon_.step(from, to, arm);
    });
  }
  const WealthLedger& ledger() const override { return mon_.ledger(); }
  std::int64_t state_events() const override { return mon_.next_index() - 1; }
  json state() const override {
    const auto& c = mon_.counts();
    return {{"good_trt", c.good_trt}, {"total_trt", c.total_trt}, {"good_ctrl", c.good_ctrl}, {"total_ctrl", c.total_ctrl}};
  }
  static TransitionCounts counts_from(const json& j) {
    StrictObject o(j, "checkpoint state: ", true);
    TransitionCounts c;
    c.good_trt = o.integer("good_trt");
    c.total_trt = o.integer("total_trt");
    c.good_ctrl = o.integer("good_ctrl");
    c.total_ctrl = o.integer("total_ctrl");
    o.finish();
    return c;
  }

 private:
  MultistateMonitor mon_;
};

std::unique_ptr<Monitor> build(const MonitorSettings& s, const json* state, WealthLedger ledger) {
  switch (s.variant) {
    case Variant::Binary:
      return std::make_unique<BinaryAdapter>(s, state ? BinaryAdapter::counts_from(*state) : BinaryCounts{},
                                             std::move(ledger));
    case Variant::Deaths:
      return std::make_unique<DeathsAdapter>(s, state ? DeathsAdapter::counts_from(*state) : DeathCounts{},
                                             std::move(ledger));
    case Variant::Continuous: {
      const auto past = state ? ContinuousAdapter::history_from(*state) : std::vector<ContinuousMonitor::Observation>{};
      return std::make_unique<ContinuousAdapter>(s, past, std::move(ledger));
    }
    case Variant::Survival: {
      SurvivalScore sc;
      if (state) {
        sc = SurvivalAdapter::score_from(*state);
      } else {
        sc.risk_trt = s.n_trt;
        sc.risk_ctrl = s.n_ctrl;
      }
      return std::make_unique<SurvivalAdapter>(s, sc, std::move(ledger));
    }
    case Variant::Multistate:
      return std::make_unique<MultistateAdapter>(s, state ? MultistateAdapter::counts_from(*state) : TransitionCounts{},
                                                 std::move(ledger));
  }
  throw ConfigError("unknown variant");
}

}  // namespace

std::unique_ptr<Monitor> make_monitor(const MonitorSettings& settings) {
  settings.validate();
  return build(settings, nullptr, WealthLedger(settings.alpha, false));
}

json make_checkpoint(const Monitor& monitor) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["variant"] = std::string(variant_name(monitor.settings().variant));
  j["config"] = monitor.settings().to_json();
  j["config_hash"] = monitor.settings().config_hash();
  j["events_processed"] = monitor.events_processed();
  j["ledger"] = ledger_to_json(monitor.ledger().snapshot());
  j["state"] = monitor.state();
  return j;
}

std::unique_ptr<Monitor> restore_monitor(const MonitorSettings& settings, const json& checkpoint) {
  settings.validate();
  StrictObject o(checkpoint, "checkpoint: ", true);
  if (o.integer("schema_version") != kSchemaVersion) o.fail("unsupported schema_version");
  if (o.text("variant") != variant_name(settings.variant)) throw ConfigError("checkpoint variant does not match");
  o.at("config");
  if (o.text("config_hash") != settings.config_hash()) {
    throw ConfigError("checkpoint config hash does not match the current settings");
  }
  const std::int64_t processed = o.integer("events_processed");
  const auto snap = ledger_from_json(o.at("ledger"));
  const json& state = o.at("state");
  o.finish();
  if (snap.count != processed) o.fail("events_processed disagrees with ledger");
  auto mon = build(settings, &state, WealthLedger::restore(snap, false));
  if (mon->state_events() != processed) throw DataError("checkpoint: state disagrees with events_processed");
  return mon;
}

}  // namespace ert::io
