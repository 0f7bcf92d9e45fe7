#pragma once

namespace odlae {

// Convex weights between the reconstruction and prediction objectives and
// the discount rates that drive their multiplicative adaptation.
struct TradeoffState {
  double a_re = 0.5;
  double a_pre = 0.5;
  double beta_re = 0.99;
  double beta_pre = 0.99;

  void validate() const;
  friend bool operator==(const TradeoffState&, const TradeoffState&) = default;
};

// a_re * l_re + a_pre * l_pre. Throws InvalidInput on negative or
// non-finite losses.
double total_loss(double l_re, double l_pre, const TradeoffState& s);

// One multiplicative step. Each coefficient is discounted by its beta raised
// to the (clipped at 1) loss it incurred, then the pair is renormalized, so
// the objective that is currently doing worse loses weight.
TradeoffState update_tradeoffs(const TradeoffState& s, double l_re, double l_pre);

}  // namespace odlae
