#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "core/cascade.hpp"
#include "core/graph.hpp"
#include "core/rng.hpp"

namespace oim {

// Per-edge influence probability estimates, one per edge id.
using Estimate = std::vector<double>;

// Semi-bandit sufficient statistics: times observed (T) and times live (N).
class EdgeStats {
 public:
  explicit EdgeStats(std::size_t edge_count = 0)
      : t_count_(edge_count, 0), n_count_(edge_count, 0) {}
  // Throws kArgument unless n <= t elementwise and sizes match.
  EdgeStats(std::vector<std::uint64_t> t_count, std::vector<std::uint64_t> n_count);

  std::size_t size() const { return t_count_.size(); }
  std::uint64_t t_count(EdgeId e) const { return t_count_[e]; }
  std::uint64_t n_count(EdgeId e) const { return n_count_[e]; }

  void record(EdgeId e, bool live) {
    ++t_count_[e];
    if (live) ++n_count_[e];
  }
  void record(const CascadeOutcome& outcome);

 private:
  std::vector<std::uint64_t> t_count_;
  std::vector<std::uint64_t> n_count_;
};

struct BetaPrior {
  double alpha = 1.0;
  double beta = 1.0;
  void validate() const;
};

// Beta(alpha + N, beta + T - N).
BetaPrior beta_posterior(const EdgeStats& stats, EdgeId e, const BetaPrior& prior);

Estimate empirical_mean(const EdgeStats& stats, double default_value = 0.5);
Estimate random_explore(std::size_t edge_count, double lo, double hi, Rng& rng);
Estimate cucb_estimate(const EdgeStats& stats, std::size_t round, double exploration_coeff);

// min(1, c / t).
double epsilon_greedy_rate(double c, std::size_t round);

struct EpsilonGreedyDraw {
  Estimate estimate;
  bool explored = false;
};
EpsilonGreedyDraw epsilon_greedy_estimate(const EdgeStats& stats, std::size_t round, double c,
                                          Rng& rng, double default_value = 0.5);

Estimate beta_ts_sample(const EdgeStats& stats, const BetaPrior& prior, Rng& rng);

// Ridge-regression state: gram = lambda*I + sum x x^T, response = sum x w,
// theta_hat = gram^-1 response. The Cholesky factor is refreshed on every
// update.
class LinearModelState {
 public:
  LinearModelState(std::size_t dim, double lambda);

  std::size_t dim() const { return static_cast<std::size_t>(gram_.rows()); }
  double lambda() const { return lambda_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& response() const { return response_; }
  const Eigen::VectorXd& theta_hat() const { return theta_hat_; }
  std::uint64_t observation_count() const { return observations_; }

  // Accumulates without refactorizing; call refresh() afterwards.
  void accumulate(const Eigen::Ref<const Eigen::VectorXd>& x, double reward);
  void accumulate_gram(const Eigen::Ref<const Eigen::VectorXd>& x);
  void accumulate_response(const Eigen::Ref<const Eigen::VectorXd>& x, double reward);
  void refresh();

  // Rows of `features` paired with `rewards`. Throws kDimension on mismatch.
  void update(const Eigen::Ref<const Eigen::MatrixXd>& features,
              std::span<const double> rewards);

  double log_det() const;
  // sqrt(lambda) + sqrt(log(det(gram) / (lambda^d delta^2))).
  double confidence_radius(double delta) const;
  // ||gram * theta_hat - response||.
  double residual_norm() const;
  // sqrt(x^T gram^-1 x) for every row of `features`.
  Eigen::VectorXd widths(const Eigen::Ref<const Eigen::MatrixXd>& features) const;
  // theta_hat + scale * L^-T z, z ~ N(0, I), where gram = L L^T.
  Eigen::VectorXd sample_theta(double scale, Rng& rng) const;

 private:
  double lambda_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd response_;
  Eigen::VectorXd theta_hat_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  std::uint64_t observations_ = 0;
};

// v = R * sqrt(9 d log(t / delta)), zero when t <= delta.
double thompson_scale(double noise_r, std::size_t dim, std::size_t round, double delta);

Estimate linucb_estimate(const LinearModelState& state, const FeatureMap& features,
                         double delta);
Estimate linthompson_sample(const LinearModelState& state, const FeatureMap& features,
                            double scale, Rng& rng);
Estimate linthompson_ucb_estimate(const LinearModelState& state, const FeatureMap& features,
                                  double delta, double scale, Rng& rng);

// ---------------------------------------------------------------------------
// Stateful strategies consumed by the round loop and the ensemble.

struct RoundContext {
  std::size_t round = 1;
  const DirectedGraph* graph = nullptr;
  const FeatureMap* features = nullptr;
};

enum class LinearTarget { kSampled, kBit };

struct StrategyParams {
  double mean_default = 0.5;
  double explore_lo = 0.0;
  double explore_hi = 0.01;
  double cucb_coeff = 1.0;
  double epsilon_c = 0.1;
  BetaPrior prior;
  double lambda = 1.0;
  double delta = 0.05;
  double noise_r = 0.5;
  bool gram_all_edges = false;
  // Unset: kSampled for the Thompson variants, kBit for imlinucb.
  std::string linear_target;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual Estimate estimate(const RoundContext& ctx, Rng& rng) = 0;
  virtual void observe(const RoundContext& ctx, const CascadeOutcome& outcome, Rng& rng) = 0;
  virtual bool needs_features() const { return false; }
};

// Known names: exploit_mean, explore_rand, rand_plus_mean, cucb,
// epsilon_greedy, beta_ts, imlinucb, linthompson, linthompson_ucb.
std::unique_ptr<Strategy> make_strategy(const std::string& name, std::size_t edge_count,
                                        std::size_t feature_dim, const StrategyParams& params);

std::vector<std::string> base_strategy_names();

}  // namespace oim
