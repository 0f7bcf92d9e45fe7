#include "odlae/loss_balance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "odlae/errors.hpp"

namespace odlae {

namespace {

void check_losses(double l_re, double l_pre, const char* op) {
  if (!std::isfinite(l_re) || !std::isfinite(l_pre) || l_re < 0.0 || l_pre < 0.0) {
    throw InvalidInput(std::string(op) + ": losses must be finite and non-negative");
  }
}

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

void TradeoffState::validate() const {
  if (!(a_re > 0.0) || !(a_pre > 0.0) || std::abs(a_re + a_pre - 1.0) > 1e-12) {
    throw ConfigError("trade-off weights must be positive and sum to 1");
  }
  if (!in_open_unit(beta_re) || !in_open_unit(beta_pre)) {
    throw ConfigError("trade-off discounts must lie in (0, 1)");
  }
}

double total_loss(double l_re, double l_pre, const TradeoffState& s) {
  check_losses(l_re, l_pre, "total_loss");
  return s.a_re * l_re + s.a_pre * l_pre;
}

TradeoffState update_tradeoffs(const TradeoffState& s, double l_re, double l_pre) {
  check_losses(l_re, l_pre, "update_tradeoffs");
  const double re = s.a_re * std::pow(s.beta_re, std::min(l_re, 1.0));
  const double pre = s.a_pre * std::pow(s.beta_pre, std::min(l_pre, 1.0));
  TradeoffState next = s;
  next.a_re = re / (re + pre);
  next.a_pre = pre / (re + pre);
  return next;
}

}  // namespace odlae
