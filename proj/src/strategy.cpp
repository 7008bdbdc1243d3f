#include "ert/strategy.hpp"

#include <charconv>

#include "ert/core.hpp"

namespace ert {

BettingStrategy BettingStrategy::fixed(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("fixed wager must lie in (0,1)");
  return {StrategyKind::Fixed, lambda};
}

BettingStrategy BettingStrategy::sign_only(double c) {
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("sign-only strength must lie in (0,1)");
  return {StrategyKind::SignOnly, c};
}

namespace {

double parse_param(std::string_view text, std::string_view tag) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("strategy '" + std::string(tag) + "' needs a parameter, e.g. " + std::string(tag) + ":0.25");
  }
  const std::string value(text.substr(colon + 1));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) throw ConfigError("bad strategy parameter: " + value);
  return v;
}

}  // namespace

BettingStrategy BettingStrategy::parse(std::string_view text) {
  const auto head = text.substr(0, text.find(':'));
  if (head == "half-kelly" && head.size() == text.size()) return half_kelly();
  if (head == "full-kelly" && head.size() == text.size()) return full_kelly();
  if (head == "doubly-adaptive" && head.size() == text.size()) return doubly_adaptive();
  if (head == "fixed") return fixed(parse_param(text, head));
  if (head == "sign-only") return sign_only(parse_param(text, head));
  throw ConfigError("unknown betting strategy: " + std::string(text));
}

std::string BettingStrategy::to_string() const {
  // Shortest text that parses back to the same double.
  auto with_param = [this](const char* tag) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, param);
    return std::string(tag) + std::string(buf, res.ptr);
  };
  switch (kind) {
    case StrategyKind::AdaptiveHalfKelly: return "half-kelly";
    case StrategyKind::AdaptiveFullKelly: return "full-kelly";
    case StrategyKind::DoublyAdaptive: return "doubly-adaptive";
    case StrategyKind::Fixed: return with_param("fixed:");
    case StrategyKind::SignOnly: return with_param("sign-only:");
  }
  return "?";
}

}  // namespace ert
