#include "core/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "core/error.hpp"

namespace oim {

namespace {

void recompute_probs(Exp3State& s) {
  double total = 0.0;
  for (double w : s.weights) total += w;
  const double n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.probs[i] = (1.0 - s.gamma) * s.weights[i] / total + s.gamma / n;
  }
}

}  // namespace

Exp3State exp3_init(std::size_t n, double gamma) {
  if (n == 0) throw_error(ErrorCode::kArgument, "exp3 needs at least one strategy");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw_error(ErrorCode::kArgument, fmt::format("exp3 gamma {} not in (0,1]", gamma));
  }
  Exp3State s;
  s.weights.assign(n, 1.0);
  s.probs.assign(n, 1.0 / static_cast<double>(n));
  s.gamma = gamma;
  return s;
}

std::size_t exp3_sample(const Exp3State& state, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.probs[i] <= 0.0) continue;
    last_positive = i;
    cumulative += state.probs[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

Exp3State exp3_update(const Exp3State& state, std::size_t spread, std::size_t node_count,
                      std::size_t chosen) {
  if (chosen >= state.size()) {
    throw_error(ErrorCode::kArgument,
                fmt::format("chosen strategy {} out of range for {}", chosen, state.size()));
  }
  if (node_count == 0 || spread > node_count) {
    throw_error(ErrorCode::kArgument,
                fmt::format("spread {} not in [0, node_count={}]", spread, node_count));
  }
  Exp3State next = state;
  const double g = static_cast<double>(spread) / static_cast<double>(node_count);
  next.weights[chosen] *= std::exp(state.gamma * g / state.probs[chosen]);

  const double max_w = *std::max_element(next.weights.begin(), next.weights.end());
  if (max_w > kExp3WeightCeiling) {
    for (double& w : next.weights) w /= max_w;
  }
  recompute_probs(next);
  return next;
}

EnsembleChoice run_ensemble_round(std::span<const std::unique_ptr<Strategy>> members,
                                  const Exp3State& state, const RoundContext& ctx, Rng& rng) {
  if (members.empty() || members.size() != state.size()) {
    throw_error(ErrorCode::kArgument,
                fmt::format("{} members for an exp3 state over {}", members.size(), state.size()));
  }
  EnsembleChoice out;
  out.chosen = members.size() == 1 ? 0 : exp3_sample(state, rng);
  out.estimate = members[out.chosen]->estimate(ctx, rng);
  return out;
}

Ensemble::Ensemble(std::string label, std::vector<std::unique_ptr<Strategy>> members,
                   double gamma, FeedbackMode mode)
    : label_(std::move(label)),
      members_(std::move(members)),
      state_(exp3_init(members_.size(), gamma)),
      mode_(mode) {}

Estimate Ensemble::estimate(const RoundContext& ctx, Rng& rng) {
  EnsembleChoice choice = run_ensemble_round(members_, state_, ctx, rng);
  last_chosen_ = choice.chosen;
  return std::move(choice.estimate);
}

void Ensemble::observe(const RoundContext& ctx, const CascadeOutcome& outcome, Rng& rng) {
  state_ = exp3_update(state_, outcome.spread(), ctx.graph->node_count(), last_chosen_);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (mode_ == FeedbackMode::kShared || i == last_chosen_) members_[i]->observe(ctx, outcome, rng);
  }
}

bool Ensemble::needs_features() const {
  return std::any_of(members_.begin(), members_.end(),
                     [](const auto& m) { return m->needs_features(); });
}

std::vector<std::string> Ensemble::member_names() const {
  std::vector<std::string> names;
  for (const auto& m : members_) names.push_back(m->name());
  return names;
}

}  // namespace oim
