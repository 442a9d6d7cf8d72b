#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/strategies.hpp"

namespace oim {

// EXP3 meta-learner state over N base strategies.
struct Exp3State {
  std::vector<double> weights;
  std::vector<double> probs;
  double gamma = 0.1;

  std::size_t size() const { return weights.size(); }
};

inline constexpr double kExp3WeightCeiling = 1e100;

// Uniform probabilities and unit weights. Throws kArgument unless n >= 1 and
// 0 < gamma <= 1.
Exp3State exp3_init(std::size_t n, double gamma);

// Index i with probability probs[i].
std::size_t exp3_sample(const Exp3State& state, Rng& rng);

// g = spread / node_count; only the chosen weight is multiplied by
// exp(gamma * g / probs[chosen]); probs become (1 - gamma) w / sum(w) + gamma / N.
// Weights are divided by their maximum once it exceeds kExp3WeightCeiling.
Exp3State exp3_update(const Exp3State& state, std::size_t spread, std::size_t node_count,
                      std::size_t chosen);

struct EnsembleChoice {
  Estimate estimate;
  std::size_t chosen = 0;
};

// Samples a member from `state` and returns that member's estimate.
EnsembleChoice run_ensemble_round(std::span<const std::unique_ptr<Strategy>> members,
                                  const Exp3State& state, const RoundContext& ctx, Rng& rng);

enum class FeedbackMode {
  // Every member sees every round's feedback.
  kShared,
  // Only the member that produced the round's estimate sees it.
  kChosenOnly,
};

class Ensemble final : public Strategy {
 public:
  Ensemble(std::string label, std::vector<std::unique_ptr<Strategy>> members, double gamma,
           FeedbackMode mode = FeedbackMode::kShared);

  std::string name() const override { return label_; }
  Estimate estimate(const RoundContext& ctx, Rng& rng) override;
  // Applies the EXP3 update for the last chosen member, then member feedback.
  void observe(const RoundContext& ctx, const CascadeOutcome& outcome, Rng& rng) override;
  bool needs_features() const override;

  const Exp3State& state() const { return state_; }
  std::size_t last_chosen() const { return last_chosen_; }
  std::vector<std::string> member_names() const;

 private:
  std::string label_;
  std::vector<std::unique_ptr<Strategy>> members_;
  Exp3State state_;
  FeedbackMode mode_;
  std::size_t last_chosen_ = 0;
};

}  // namespace oim
