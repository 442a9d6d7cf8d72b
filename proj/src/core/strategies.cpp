#include "core/strategies.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "core/error.hpp"

namespace oim {

namespace {

double clamp01(double p) { return std::isnan(p) ? 0.0 : std::clamp(p, 0.0, 1.0); }

void check_features(const LinearModelState& state, const FeatureMap& features) {
  if (features.dimension() != state.dim()) {
    throw_error(ErrorCode::kDimension,
                fmt::format("feature dimension {} does not match model dimension {}",
                            features.dimension(), state.dim()));
  }
}

void check_explore_range(double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw_error(ErrorCode::kArgument,
                fmt::format("explore range [{}, {}) must satisfy 0 <= lo < hi <= 1", lo, hi));
  }
}

}  // namespace

EdgeStats::EdgeStats(std::vector<std::uint64_t> t_count, std::vector<std::uint64_t> n_count)
    : t_count_(std::move(t_count)), n_count_(std::move(n_count)) {
  if (t_count_.size() != n_count_.size()) {
    throw_error(ErrorCode::kArgument, "edge stats size mismatch");
  }
  for (std::size_t e = 0; e < t_count_.size(); ++e) {
    if (n_count_[e] > t_count_[e]) {
      throw_error(ErrorCode::kArgument,
                  fmt::format("edge {}: success count {} exceeds observation count {}", e,
                              n_count_[e], t_count_[e]));
    }
  }
}

void EdgeStats::record(const CascadeOutcome& outcome) {
  for (std::size_t i = 0; i < outcome.observed_edges.size(); ++i) {
    record(outcome.observed_edges[i], outcome.activation_bit[i] != 0);
  }
}

void BetaPrior::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw_error(ErrorCode::kArgument,
                fmt::format("beta prior ({}, {}) must be positive", alpha, beta));
  }
}

BetaPrior beta_posterior(const EdgeStats& stats, EdgeId e, const BetaPrior& prior) {
  const auto n = static_cast<double>(stats.n_count(e));
  const auto t = static_cast<double>(stats.t_count(e));
  return {prior.alpha + n, prior.beta + t - n};
}

Estimate empirical_mean(const EdgeStats& stats, double default_value) {
  Estimate out(stats.size());
  for (EdgeId e = 0; e < stats.size(); ++e) {
    const std::uint64_t t = stats.t_count(e);
    out[e] = t == 0 ? clamp01(default_value)
                    : static_cast<double>(stats.n_count(e)) / static_cast<double>(t);
  }
  return out;
}

Estimate random_explore(std::size_t edge_count, double lo, double hi, Rng& rng) {
  check_explore_range(lo, hi);
  Estimate out(edge_count);
  for (double& p : out) p = rng.uniform(lo, hi);
  return out;
}

Estimate cucb_estimate(const EdgeStats& stats, std::size_t round, double exploration_coeff) {
  if (round < 1) throw_error(ErrorCode::kArgument, "cucb round must be >= 1");
  const double log_t = std::log(static_cast<double>(round));
  Estimate out(stats.size());
  for (EdgeId e = 0; e < stats.size(); ++e) {
    const std::uint64_t t = stats.t_count(e);
    if (t == 0) {
      out[e] = 1.0;
      continue;
    }
    const double td = static_cast<double>(t);
    const double mean = static_cast<double>(stats.n_count(e)) / td;
    out[e] = clamp01(mean + exploration_coeff * std::sqrt(3.0 * log_t / (2.0 * td)));
  }
  return out;
}

double epsilon_greedy_rate(double c, std::size_t round) {
  if (!(c > 0.0)) throw_error(ErrorCode::kArgument, "epsilon-greedy c must be positive");
  if (round < 1) throw_error(ErrorCode::kArgument, "epsilon-greedy round must be >= 1");
  return std::min(1.0, c / static_cast<double>(round));
}

EpsilonGreedyDraw epsilon_greedy_estimate(const EdgeStats& stats, std::size_t round, double c,
                                          Rng& rng, double default_value) {
  const double rate = epsilon_greedy_rate(c, round);
  if (rng.uniform() < rate) return {random_explore(stats.size(), 0.0, 1.0, rng), true};
  return {empirical_mean(stats, default_value), false};
}

Estimate beta_ts_sample(const EdgeStats& stats, const BetaPrior& prior, Rng& rng) {
  prior.validate();
  Estimate out(stats.size());
  for (EdgeId e = 0; e < stats.size(); ++e) {
    const BetaPrior post = beta_posterior(stats, e, prior);
    out[e] = clamp01(rng.beta(post.alpha, post.beta));
  }
  return out;
}

LinearModelState::LinearModelState(std::size_t dim, double lambda) : lambda_(lambda) {
  if (dim == 0) throw_error(ErrorCode::kDimension, "linear model dimension must be >= 1");
  if (!(lambda > 0.0)) throw_error(ErrorCode::kArgument, "ridge lambda must be positive");
  const auto d = static_cast<Eigen::Index>(dim);
  gram_ = lambda * Eigen::MatrixXd::Identity(d, d);
  response_ = Eigen::VectorXd::Zero(d);
  theta_hat_ = Eigen::VectorXd::Zero(d);
  chol_.compute(gram_);
}

void LinearModelState::accumulate(const Eigen::Ref<const Eigen::VectorXd>& x, double reward) {
  accumulate_gram(x);
  accumulate_response(x, reward);
}

void LinearModelState::accumulate_gram(const Eigen::Ref<const Eigen::VectorXd>& x) {
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  ++observations_;
}

void LinearModelState::accumulate_response(const Eigen::Ref<const Eigen::VectorXd>& x,
                                           double reward) {
  response_ += reward * x;
}

void LinearModelState::refresh() {
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
  chol_.compute(gram_);
  if (chol_.info() != Eigen::Success) {
    throw_error(ErrorCode::kNumeric, "gram matrix is not positive definite");
  }
  theta_hat_ = chol_.solve(response_);
}

void LinearModelState::update(const Eigen::Ref<const Eigen::MatrixXd>& features,
                              std::span<const double> rewards) {
  if (static_cast<std::size_t>(features.cols()) != dim() ||
      static_cast<std::size_t>(features.rows()) != rewards.size()) {
    throw_error(ErrorCode::kDimension,
                fmt::format("observations are {}x{} with {} rewards, model dimension {}",
                            features.rows(), features.cols(), rewards.size(), dim()));
  }
  if (rewards.empty()) return;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    accumulate(features.row(i).transpose(), rewards[static_cast<std::size_t>(i)]);
  }
  refresh();
}

double LinearModelState::log_det() const {
  const auto diag = chol_.matrixLLT().diagonal();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) sum += std::log(diag[i]);
  return 2.0 * sum;
}

double LinearModelState::confidence_radius(double delta) const {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw_error(ErrorCode::kArgument, fmt::format("delta {} not in (0,1]", delta));
  }
  const double ld = log_det();
  if (!std::isfinite(ld)) throw_error(ErrorCode::kNumeric, "gram determinant is not finite");
  const double log_term =
      ld - static_cast<double>(dim()) * std::log(lambda_) - 2.0 * std::log(delta);
  return std::sqrt(lambda_) + std::sqrt(std::max(0.0, log_term));
}

double LinearModelState::residual_norm() const {
  return (gram_.selfadjointView<Eigen::Lower>() * theta_hat_ - response_).norm();
}

Eigen::VectorXd LinearModelState::widths(const Eigen::Ref<const Eigen::MatrixXd>& features) const {
  // x^T (L L^T)^-1 x = ||L^-1 x||^2
  Eigen::MatrixXd z = chol_.matrixL().solve(features.transpose());
  return z.colwise().norm().transpose();
}

Eigen::VectorXd LinearModelState::sample_theta(double scale, Rng& rng) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(dim()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  if (scale == 0.0) return theta_hat_;
  Eigen::VectorXd noise = chol_.matrixU().solve(z);
  return theta_hat_ + scale * noise;
}

double thompson_scale(double noise_r, std::size_t dim, std::size_t round, double delta) {
  const double ratio = static_cast<double>(round) / delta;
  if (ratio <= 1.0) return 0.0;
  return noise_r * std::sqrt(9.0 * static_cast<double>(dim) * std::log(ratio));
}

Estimate linucb_estimate(const LinearModelState& state, const FeatureMap& features,
                         double delta) {
  check_features(state, features);
  const double beta = state.confidence_radius(delta);
  const Eigen::VectorXd mean = features.edge_feature * state.theta_hat();
  const Eigen::VectorXd width = state.widths(features.edge_feature);
  Estimate out(static_cast<std::size_t>(mean.size()));
  for (Eigen::Index e = 0; e < mean.size(); ++e) out[e] = clamp01(mean[e] + beta * width[e]);
  return out;
}

Estimate linthompson_sample(const LinearModelState& state, const FeatureMap& features,
                            double scale, Rng& rng) {
  check_features(state, features);
  const Eigen::VectorXd theta = state.sample_theta(scale, rng);
  const Eigen::VectorXd mean = features.edge_feature * theta;
  Estimate out(static_cast<std::size_t>(mean.size()));
  for (Eigen::Index e = 0; e < mean.size(); ++e) out[e] = clamp01(mean[e]);
  return out;
}

Estimate linthompson_ucb_estimate(const LinearModelState& state, const FeatureMap& features,
                                  double delta, double scale, Rng& rng) {
  check_features(state, features);
  const double beta = state.confidence_radius(delta);
  const Eigen::VectorXd theta = state.sample_theta(scale, rng);
  const Eigen::VectorXd mean = features.edge_feature * theta;
  const Eigen::VectorXd width = state.widths(features.edge_feature);
  Estimate out(static_cast<std::size_t>(mean.size()));
  for (Eigen::Index e = 0; e < mean.size(); ++e) out[e] = clamp01(mean[e] + beta * width[e]);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class ExploitMean final : public Strategy {
 public:
  ExploitMean(std::size_t edges, double fallback) : stats_(edges), fallback_(fallback) {}
  std::string name() const override { return "exploit_mean"; }
  Estimate estimate(const RoundContext&, Rng&) override { return empirical_mean(stats_, fallback_); }
  void observe(const RoundContext&, const CascadeOutcome& outcome, Rng&) override {
    stats_.record(outcome);
  }

 private:
  EdgeStats stats_;
  double fallback_;
};

class ExploreRand final : public Strategy {
 public:
  ExploreRand(std::size_t edges, double lo, double hi) : edges_(edges), lo_(lo), hi_(hi) {
    check_explore_range(lo, hi);
  }
  std::string name() const override { return "explore_rand"; }
  Estimate estimate(const RoundContext&, Rng& rng) override {
    return random_explore(edges_, lo_, hi_, rng);
  }
  void observe(const RoundContext&, const CascadeOutcome&, Rng&) override {}

 private:
  std::size_t edges_;
  double lo_, hi_;
};

// Empirical mean plus a U(lo, hi) perturbation, clamped.
class RandPlusMean final : public Strategy {
 public:
  RandPlusMean(std::size_t edges, double lo, double hi, double fallback)
      : stats_(edges), lo_(lo), hi_(hi), fallback_(fallback) {
    check_explore_range(lo, hi);
  }
  std::string name() const override { return "rand_plus_mean"; }
  Estimate estimate(const RoundContext&, Rng& rng) override {
    Estimate mean = empirical_mean(stats_, fallback_);
    const Estimate noise = random_explore(mean.size(), lo_, hi_, rng);
    for (std::size_t e = 0; e < mean.size(); ++e) mean[e] = clamp01(mean[e] + noise[e]);
    return mean;
  }
  void observe(const RoundContext&, const CascadeOutcome& outcome, Rng&) override {
    stats_.record(outcome);
  }

 private:
  EdgeStats stats_;
  double lo_, hi_, fallback_;
};

class Cucb final : public Strategy {
 public:
  Cucb(std::size_t edges, double coeff) : stats_(edges), coeff_(coeff) {}
  std::string name() const override { return "cucb"; }
  Estimate estimate(const RoundContext& ctx, Rng&) override {
    return cucb_estimate(stats_, ctx.round, coeff_);
  }
  void observe(const RoundContext&, const CascadeOutcome& outcome, Rng&) override {
    stats_.record(outcome);
  }

 private:
  EdgeStats stats_;
  double coeff_;
};

class EpsilonGreedy final : public Strategy {
 public:
  EpsilonGreedy(std::size_t edges, double c, double fallback)
      : stats_(edges), c_(c), fallback_(fallback) {
    epsilon_greedy_rate(c, 1);
  }
  std::string name() const override { return "epsilon_greedy"; }
  Estimate estimate(const RoundContext& ctx, Rng& rng) override {
    return epsilon_greedy_estimate(stats_, ctx.round, c_, rng, fallback_).estimate;
  }
  void observe(const RoundContext&, const CascadeOutcome& outcome, Rng&) override {
    stats_.record(outcome);
  }

 private:
  EdgeStats stats_;
  double c_, fallback_;
};

class BetaThompson final : public Strategy {
 public:
  BetaThompson(std::size_t edges, BetaPrior prior) : stats_(edges), prior_(prior) {
    prior_.validate();
  }
  std::string name() const override { return "beta_ts"; }
  Estimate estimate(const RoundContext&, Rng& rng) override {
    return beta_ts_sample(stats_, prior_, rng);
  }
  void observe(const RoundContext&, const CascadeOutcome& outcome, Rng&) override {
    stats_.record(outcome);
  }

 private:
  EdgeStats stats_;
  BetaPrior prior_;
};

enum class LinearKind { kUcb, kThompson, kThompsonUcb };

// The contextual strategies share the ridge-regression state. With the
// sampled target each observed edge contributes x * p~, where p~ is drawn
// from the edge's Beta posterior after recording the observation.
class LinearStrategy final : public Strategy {
 public:
  LinearStrategy(LinearKind kind, std::size_t edges, std::size_t dim, const StrategyParams& params,
                 LinearTarget target)
      : kind_(kind),
        params_(params),
        target_(target),
        state_(dim, params.lambda),
        stats_(edges) {
    params_.prior.validate();
    if (!(params.delta > 0.0 && params.delta <= 1.0)) {
      throw_error(ErrorCode::kArgument, fmt::format("delta {} not in (0,1]", params.delta));
    }
    if (!(params.noise_r >= 0.0)) throw_error(ErrorCode::kArgument, "noise_r must be >= 0");
  }

  std::string name() const override {
    switch (kind_) {
      case LinearKind::kUcb: return "imlinucb";
      case LinearKind::kThompson: return "linthompson";
      case LinearKind::kThompsonUcb: return "linthompson_ucb";
    }
    return "linear";
  }

  bool needs_features() const override { return true; }

  Estimate estimate(const RoundContext& ctx, Rng& rng) override {
    const FeatureMap& features = require(ctx);
    const double scale = thompson_scale(params_.noise_r, state_.dim(), ctx.round, params_.delta);
    switch (kind_) {
      case LinearKind::kUcb: return linucb_estimate(state_, features, params_.delta);
      case LinearKind::kThompson: return linthompson_sample(state_, features, scale, rng);
      case LinearKind::kThompsonUcb:
        return linthompson_ucb_estimate(state_, features, params_.delta, scale, rng);
    }
    return {};
  }

  void observe(const RoundContext& ctx, const CascadeOutcome& outcome, Rng& rng) override {
    const FeatureMap& features = require(ctx);
    const auto& x = features.edge_feature;
    for (std::size_t i = 0; i < outcome.observed_edges.size(); ++i) {
      const EdgeId e = outcome.observed_edges[i];
      const bool live = outcome.activation_bit[i] != 0;
      stats_.record(e, live);
      double reward = live ? 1.0 : 0.0;
      if (target_ == LinearTarget::kSampled) {
        const BetaPrior post = beta_posterior(stats_, e, params_.prior);
        reward = rng.beta(post.alpha, post.beta);
      }
      if (params_.gram_all_edges) {
        state_.accumulate_response(x.row(e).transpose(), reward);
      } else {
        state_.accumulate(x.row(e).transpose(), reward);
      }
    }
    if (params_.gram_all_edges) {
      for (Eigen::Index e = 0; e < x.rows(); ++e) state_.accumulate_gram(x.row(e).transpose());
    }
    state_.refresh();
  }

  const LinearModelState& state() const { return state_; }

 private:
  const FeatureMap& require(const RoundContext& ctx) const {
    if (ctx.features == nullptr) {
      throw_error(ErrorCode::kArgument, fmt::format("{} needs edge features", name()));
    }
    if (ctx.features->dimension() != state_.dim()) {
      throw_error(ErrorCode::kDimension, "feature dimension does not match the linear model");
    }
    return *ctx.features;
  }

  LinearKind kind_;
  StrategyParams params_;
  LinearTarget target_;
  LinearModelState state_;
  EdgeStats stats_;
};

LinearTarget resolve_target(const std::string& configured, LinearTarget fallback) {
  if (configured.empty()) return fallback;
  if (configured == "sampled") return LinearTarget::kSampled;
  if (configured == "bit") return LinearTarget::kBit;
  throw_error(ErrorCode::kArgument,
              fmt::format("linear_target must be \"sampled\" or \"bit\", got \"{}\"", configured));
}

}  // namespace

std::vector<std::string> base_strategy_names() {
  return {"exploit_mean", "explore_rand", "rand_plus_mean", "cucb",           "epsilon_greedy",
          "beta_ts",      "imlinucb",     "linthompson",    "linthompson_ucb"};
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, std::size_t edge_count,
                                        std::size_t feature_dim, const StrategyParams& params) {
  if (name == "exploit_mean") return std::make_unique<ExploitMean>(edge_count, params.mean_default);
  if (name == "explore_rand") {
    return std::make_unique<ExploreRand>(edge_count, params.explore_lo, params.explore_hi);
  }
  if (name == "rand_plus_mean") {
    return std::make_unique<RandPlusMean>(edge_count, params.explore_lo, params.explore_hi,
                                          params.mean_default);
  }
  if (name == "cucb") return std::make_unique<Cucb>(edge_count, params.cucb_coeff);
  if (name == "epsilon_greedy") {
    return std::make_unique<EpsilonGreedy>(edge_count, params.epsilon_c, params.mean_default);
  }
  if (name == "beta_ts") return std::make_unique<BetaThompson>(edge_count, params.prior);
  if (name == "imlinucb") {
    return std::make_unique<LinearStrategy>(LinearKind::kUcb, edge_count, feature_dim, params,
                                            resolve_target(params.linear_target, LinearTarget::kBit));
  }
  if (name == "linthompson") {
    return std::make_unique<LinearStrategy>(
        LinearKind::kThompson, edge_count, feature_dim, params,
        resolve_target(params.linear_target, LinearTarget::kSampled));
  }
  if (name == "linthompson_ucb") {
    return std::make_unique<LinearStrategy>(
        LinearKind::kThompsonUcb, edge_count, feature_dim, params,
        resolve_target(params.linear_target, LinearTarget::kSampled));
  }
  throw_error(ErrorCode::kArgument, fmt::format("unknown strategy \"{}\"", name));
}

}  // namespace oim
