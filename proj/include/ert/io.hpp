#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ert/core.hpp"
#include "ert/multistate.hpp"
#include "ert/simlab.hpp"
#include "ert/strategy.hpp"

namespace ert::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Object reader that rejects keys nobody asked for.
class StrictObject {
 public:
  /// `error_prefix` is prepended to every message (e.g. "line 7: ").
  StrictObject(const json& j, std::string error_prefix, bool data_error);

  bool has(const std::string& key) const;
  const json& at(const std::string& key);
  double number(const std::string& key);
  std::int64_t integer(const std::string& key);
  std::string text(const std::string& key);
  std::optional<double> opt_number(const std::string& key);
  std::optional<std::int64_t> opt_integer(const std::string& key);
  std::optional<std::string> opt_text(const std::string& key);
  /// Throws if any key was never read.
  void finish() const;
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  const json& j_;
  std::string prefix_;
  bool data_error_;
  std::vector<std::string> seen_;
};

std::string double_bits(double v);
double double_from_bits(const std::string& hex);

/// FNV-1a 64-bit, lowercase hex.
std::string fnv1a_hex(const std::string& data);

/// Everything that determines how a monitor turns events into wealth.
struct MonitorSettings {
  Variant variant = Variant::Binary;
  double alpha = 0.05;
  std::optional<RampSchedule> ramp;
  std::optional<BettingStrategy> strategy;
  double allocation = 0.5;  // binary, continuous
  double c_max = 0.6;       // continuous
  std::int64_t n_trt = 0;   // survival initial risk sets
  std::int64_t n_ctrl = 0;

  void validate() const;
  /// Canonical form; its dump is what the config hash covers.
  json to_json() const;
  std::string config_hash() const;
};

/// Streaming monitor over NDJSON event records of one variant.
class Monitor {
 public:
  virtual ~Monitor() = default;
  virtual const WealthStep& feed(const json& record, std::int64_t line) = 0;
  virtual const WealthLedger& ledger() const = 0;
  virtual json state() const = 0;
  /// Events implied by the variant state alone.
  virtual std::int64_t state_events() const = 0;
  const MonitorSettings& settings() const { return settings_; }
  std::int64_t events_processed() const { return ledger().size(); }

 protected:
  explicit Monitor(MonitorSettings s) : settings_(std::move(s)) {}
  MonitorSettings settings_;
};

std::unique_ptr<Monitor> make_monitor(const MonitorSettings& settings);

json make_checkpoint(const Monitor& monitor);
/// Throws ConfigError if the checkpoint was written under different settings.
std::unique_ptr<Monitor> restore_monitor(const MonitorSettings& settings, const json& checkpoint);

json ledger_to_json(const WealthLedger::Snapshot& snap);
WealthLedger::Snapshot ledger_from_json(const json& j);

/// Parses one NDJSON line; throws DataError("line N: ...") on malformed JSON.
json parse_event_line(const std::string& text, std::int64_t line);

/// Scenario file (JSON). Missing sample sizes are derived from the "design" block.
SimScenario scenario_from_json(const json& j);
SimScenario load_scenario(const std::string& path);
json scenario_to_json(const SimScenario& s);

json oc_to_json(const OperatingCharacteristics& oc);
json report_json(const SimScenario& s, const OperatingCharacteristics& oc);
void write_oc_table(std::ostream& os, const SimScenario& s, const OperatingCharacteristics& oc);

void write_head_to_head_csv(std::ostream& os, const std::vector<HeadToHeadRow>& rows);
json head_to_head_json(const HeadToHeadConfig& cfg, const std::vector<HeadToHeadRow>& rows);

void write_wage_csv(std::ostream& os, Variant v, const std::vector<WageCell>& cells);
json wage_json(const WageStudyConfig& cfg, const std::vector<WageCell>& cells);

/// Columns trial,index,lambda,multiplier,wealth.
void write_trajectories_csv(std::ostream& os, const std::vector<std::vector<WealthStep>>& paths);
/// Log-scale wealth paths with a dashed line at 1/alpha.
void write_trajectories_svg(std::ostream& os, const std::vector<std::vector<WealthStep>>& paths, double alpha,
                            const std::string& title);

}  // namespace ert::io
