#include <doctest.h>

#include <cmath>
#include <numeric>

#include "core/cascade.hpp"
#include "core/error.hpp"
#include "core/strategies.hpp"
#include "support.hpp"

using namespace oim;

namespace {

FeatureMap features_from_rows(const Eigen::MatrixXd& rows) {
  FeatureMap f;
  f.edge_feature = rows;
  f.node_embedding = Eigen::MatrixXd::Zero(1, rows.cols());
  return f;
}

bool all_in_unit(const Estimate& est) {
  return std::all_of(est.begin(), est.end(), [](double p) { return p >= 0.0 && p <= 1.0; });
}

oim::testing::DenseMatrix to_dense(const Eigen::MatrixXd& m) {
  oim::testing::DenseMatrix out(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

}  // namespace

TEST_SUITE("strategies") {

TEST_CASE("edge stats validation and recording") {
  CHECK_THROWS_AS(EdgeStats({1, 2}, {2, 0}), Error);
  CHECK_THROWS_AS(EdgeStats({1}, {0, 0}), Error);
  EdgeStats s(3);
  s.record(0, true);
  s.record(0, false);
  s.record(2, true);
  CHECK(s.t_count(0) == 2);
  CHECK(s.n_count(0) == 1);
  CHECK(s.t_count(1) == 0);
  CascadeOutcome out;
  out.observed_edges = {1, 2};
  out.activation_bit = {0, 1};
  s.record(out);
  CHECK(s.t_count(1) == 1);
  CHECK(s.n_count(1) == 0);
  CHECK(s.n_count(2) == 2);
}

TEST_CASE("edge stats are monotone and t-increments equal observed edges") {
  auto g = generate_preferential_attachment(40, 2, 1);
  std::vector<double> p(g.edge_count(), 0.3);
  EdgeStats stats(g.edge_count());
  Rng rng(1);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::uint64_t> t_before(g.edge_count()), n_before(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) t_before[e] = stats.t_count(e), n_before[e] = stats.n_count(e);
    std::vector<NodeId> seeds{static_cast<NodeId>(rng.below(40))};
    auto out = simulate_cascade(g, p, seeds, rng);
    stats.record(out);
    std::uint64_t dt = 0;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      CHECK(stats.t_count(e) >= t_before[e]);
      CHECK(stats.n_count(e) >= n_before[e]);
      CHECK(stats.n_count(e) - n_before[e] <= stats.t_count(e) - t_before[e]);
      CHECK(stats.n_count(e) <= stats.t_count(e));
      dt += stats.t_count(e) - t_before[e];
    }
    CHECK(dt == out.observed_edges.size());
  }
}

TEST_CASE("empirical mean") {
  EdgeStats s({4, 0, 7}, {3, 0, 0});
  auto est = empirical_mean(s, 0.5);
  CHECK(est[0] == 0.75);
  CHECK(est[1] == 0.5);
  CHECK(est[2] == 0.0);
  CHECK(empirical_mean(s, 0.2)[1] == 0.2);
}

TEST_CASE("random explore") {
  Rng a(2), b(2);
  auto small = random_explore(1000, 0.0, 0.01, a);
  for (double p : small) CHECK((p >= 0.0 && p < 0.01));
  auto again = random_explore(1000, 0.0, 0.01, b);
  CHECK(small == again);
  Rng c(3);
  auto full = random_explore(20000, 0.0, 1.0, c);
  const double mean = std::accumulate(full.begin(), full.end(), 0.0) / full.size();
  CHECK(std::abs(mean - 0.5) < 3 * std::sqrt(1.0 / 12 / full.size()));
  CHECK(all_in_unit(full));
  CHECK_THROWS_AS(random_explore(3, 0.5, 0.5, c), Error);
  CHECK_THROWS_AS(random_explore(3, 0.6, 0.5, c), Error);
  CHECK_THROWS_AS(random_explore(3, -0.1, 0.5, c), Error);
  CHECK_THROWS_AS(random_explore(3, 0.0, 1.5, c), Error);
}

TEST_CASE("cucb") {
  SUBCASE("unobserved edges are optimistic") {
    EdgeStats s(2);
    auto est = cucb_estimate(s, 5, 1.0);
    CHECK(est[0] == 1.0);
  }
  SUBCASE("bonus vanishes with many observations") {
    EdgeStats s({100000000}, {50000000});
    CHECK(cucb_estimate(s, 10, 1.0)[0] == doctest::Approx(0.5).epsilon(1e-3));
  }
  SUBCASE("n=1, T=2, t=e^2 clamps to 1") {
    EdgeStats s({2}, {1});
    const double raw = 0.5 + std::sqrt(3.0 * 2.0 / (2.0 * 2.0));
    CHECK(raw == doctest::Approx(1.7247).epsilon(1e-4));
    // t = e^2 is not an integer round; ln(7) is already enough to exceed 1.
    CHECK(cucb_estimate(s, 7, 1.0)[0] == 1.0);
  }
  SUBCASE("formula on a mid-range value") {
    EdgeStats s({50}, {10});
    const double expect = 0.2 + 0.1 * std::sqrt(3.0 * std::log(20.0) / 100.0);
    CHECK(cucb_estimate(s, 20, 0.1)[0] == doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK_THROWS_AS(cucb_estimate(EdgeStats(1), 0, 1.0), Error);
}

TEST_CASE("epsilon greedy rate and draws") {
  CHECK(epsilon_greedy_rate(0.1, 1) == doctest::Approx(0.1));
  CHECK(epsilon_greedy_rate(0.1, 10) == doctest::Approx(0.01));
  CHECK(epsilon_greedy_rate(10, 1) == 1.0);
  CHECK_THROWS_AS(epsilon_greedy_rate(0.0, 1), Error);
  CHECK_THROWS_AS(epsilon_greedy_rate(0.1, 0), Error);

  EdgeStats s({4, 0}, {1, 0});
  Rng rng(4);
  int explored = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    auto d = epsilon_greedy_estimate(s, 1, 0.1, rng);
    explored += d.explored;
    if (!d.explored) CHECK(d.estimate == std::vector<double>{0.25, 0.5});
    CHECK(all_in_unit(d.estimate));
  }
  const double rate = static_cast<double>(explored) / draws;
  CHECK(std::abs(rate - 0.1) < 3 * std::sqrt(0.1 * 0.9 / draws));
  for (int i = 0; i < 50; ++i) CHECK(epsilon_greedy_estimate(s, 1, 10.0, rng).explored);
}

TEST_CASE("beta posterior parameters and sampling") {
  EdgeStats s({5, 0, 1000000}, {2, 0, 1000000});
  BetaPrior prior{1, 1};
  auto post = beta_posterior(s, 0, prior);
  CHECK(post.alpha == 3.0);
  CHECK(post.beta == 4.0);

  Rng rng(5);
  const int draws = 100000;
  double sum = 0, sum_unobs = 0, min_conc = 1.0;
  for (int i = 0; i < draws; ++i) {
    auto est = beta_ts_sample(s, prior, rng);
    sum += est[0];
    sum_unobs += est[1];
    min_conc = std::min(min_conc, est[2]);
  }
  const double var37 = 3.0 * 4.0 / (49.0 * 8.0);
  CHECK(std::abs(sum / draws - 3.0 / 7.0) < 3 * std::sqrt(var37 / draws));
  CHECK(std::abs(sum_unobs / draws - 0.5) < 3 * std::sqrt(1.0 / 12 / draws));
  // Posterior Beta(1e6 + 1, 1): P(X < 0.99) is astronomically small.
  CHECK(oim::testing::incomplete_beta(1e6 + 1, 1, 0.99) < 1e-300);
  CHECK(min_conc > 0.99);

  CHECK_THROWS_AS(beta_ts_sample(s, BetaPrior{0, 1}, rng), Error);
  CHECK_THROWS_AS(BetaPrior({1, -1}).validate(), Error);
}

TEST_CASE("beta-ts means converge to Bernoulli truth") {
  const std::vector<double> truth{0.1, 0.35, 0.8};
  Rng data(6);
  EdgeStats s(3);
  for (int i = 0; i < 5000; ++i)
    for (EdgeId e = 0; e < 3; ++e) s.record(e, data.bernoulli(truth[e]));
  Rng rng(7);
  std::vector<double> mean(3, 0.0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    auto est = beta_ts_sample(s, {1, 1}, rng);
    for (int e = 0; e < 3; ++e) mean[e] += est[e] / draws;
  }
  for (int e = 0; e < 3; ++e) {
    // Posterior spread plus sampling error of the data itself.
    const double sd = std::sqrt(truth[e] * (1 - truth[e]) / 5000.0);
    CHECK(std::abs(mean[e] - truth[e]) < 3 * sd + 0.002);
  }
}

TEST_CASE("linear model: d=1 hand example") {
  LinearModelState st(1, 1.0);
  Eigen::MatrixXd x(1, 1);
  x << 2.0;
  std::vector<double> w{1.0};
  st.update(x, w);
  CHECK(st.gram()(0, 0) == 5.0);
  CHECK(st.response()[0] == 2.0);
  CHECK(st.theta_hat()[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(st.observation_count() == 1);
}

TEST_CASE("linear model: empty update is a no-op and dimension errors") {
  LinearModelState st(3, 2.0);
  Eigen::MatrixXd none(0, 3);
  st.update(none, {});
  CHECK(st.gram() == 2.0 * Eigen::MatrixXd::Identity(3, 3));
  CHECK(st.response().isZero());
  Eigen::MatrixXd wrong(1, 2);
  wrong << 1, 2;
  std::vector<double> w{1.0};
  CHECK_THROWS_AS(st.update(wrong, w), Error);
  Eigen::MatrixXd rows(2, 3);
  rows.setOnes();
  CHECK_THROWS_AS(st.update(rows, w), Error);
  CHECK_THROWS_AS(LinearModelState(0, 1.0), Error);
  CHECK_THROWS_AS(LinearModelState(2, 0.0), Error);
}

TEST_CASE("linear model: residual, symmetry and determinant invariants") {
  Rng rng(8);
  const int d = 6;
  LinearModelState st(d, 1.0);
  double prev_log_det = st.log_det();
  double prev_beta = st.confidence_radius(0.05);
  for (int batch = 0; batch < 40; ++batch) {
    Eigen::MatrixXd x(5, d);
    std::vector<double> w(5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(-1, 1);
      w[i] = rng.bernoulli(0.4);
    }
    st.update(x, w);
    CHECK(st.residual_norm() < 1e-8);
    CHECK((st.gram() - st.gram().transpose()).norm() == 0.0);
    CHECK(st.log_det() >= prev_log_det - 1e-12);
    CHECK(st.confidence_radius(0.05) >= prev_beta - 1e-12);
    prev_log_det = st.log_det();
    prev_beta = st.confidence_radius(0.05);
  }
  // log det against elimination.
  CHECK(st.log_det() == doctest::Approx(std::log(oim::testing::gauss_det(to_dense(st.gram())))).epsilon(1e-10));
  // theta against independent normal-equation solve.
  auto theta = oim::testing::gauss_solve(to_dense(st.gram()),
                                         std::vector<double>(st.response().data(), st.response().data() + d));
  for (int j = 0; j < d; ++j) CHECK(st.theta_hat()[j] == doctest::Approx(theta[j]).epsilon(1e-10));
}

TEST_CASE("linear model: ridge recovery with 1e4 observations") {
  Rng rng(9);
  const int d = 10;
  Eigen::VectorXd truth(d);
  for (int j = 0; j < d; ++j) truth[j] = rng.uniform(0.0, 0.18);
  LinearModelState st(d, 1.0);
  oim::testing::DenseMatrix gram(d, std::vector<double>(d, 0.0));
  std::vector<double> resp(d, 0.0);
  for (int j = 0; j < d; ++j) gram[j][j] = 1.0;
  Eigen::MatrixXd x(10000, d);
  std::vector<double> w(10000);
  for (int i = 0; i < 10000; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform();
    w[i] = rng.bernoulli(std::clamp(x.row(i).dot(truth), 0.0, 1.0));
    for (int a = 0; a < d; ++a) {
      resp[a] += x(i, a) * w[i];
      for (int b = 0; b < d; ++b) gram[a][b] += x(i, a) * x(i, b);
    }
  }
  st.update(x, w);
  auto oracle = oim::testing::gauss_solve(gram, resp);
  for (int j = 0; j < d; ++j) CHECK(st.theta_hat()[j] == doctest::Approx(oracle[j]).epsilon(1e-8));
  CHECK((st.theta_hat() - truth).norm() < 0.1);
}

TEST_CASE("linucb estimate") {
  SUBCASE("initial state, delta=1, unit feature gives 1") {
    LinearModelState st(3, 1.0);
    CHECK(st.confidence_radius(1.0) == doctest::Approx(1.0));
    Eigen::MatrixXd x(2, 3);
    x << 1, 0, 0, 0, 0, 0;
    auto est = linucb_estimate(st, features_from_rows(x), 1.0);
    CHECK(est[0] == 1.0);
    CHECK(est[1] == 0.0);
  }
  SUBCASE("closed form against an independent evaluation") {
    Rng rng(10);
    LinearModelState st(2, 1.0);
    Eigen::MatrixXd obs(30, 2);
    std::vector<double> w(30);
    for (int i = 0; i < 30; ++i) {
      obs(i, 0) = rng.uniform();
      obs(i, 1) = rng.uniform();
      w[i] = rng.bernoulli(0.3);
    }
    st.update(obs, w);
    Eigen::MatrixXd x(1, 2);
    x << 0.2, 0.1;
    auto g = to_dense(st.gram());
    const double det = oim::testing::gauss_det(g);
    const double beta = 1.0 + std::sqrt(std::log(det / (0.05 * 0.05)));
    auto sol = oim::testing::gauss_solve(g, {0.2, 0.1});
    auto theta = oim::testing::gauss_solve(g, {st.response()[0], st.response()[1]});
    const double width = std::sqrt(0.2 * sol[0] + 0.1 * sol[1]);
    const double expect = std::clamp(0.2 * theta[0] + 0.1 * theta[1] + beta * width, 0.0, 1.0);
    CHECK(linucb_estimate(st, features_from_rows(x), 0.05)[0] == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("argmax of the mean term is scale free") {
    Rng rng(11);
    LinearModelState a(3, 1.0), b(3, 1.0);
    Eigen::MatrixXd obs(20, 3);
    std::vector<double> w(20);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 3; ++j) obs(i, j) = rng.uniform();
      w[i] = rng.bernoulli(0.5);
    }
    a.update(obs, w);
    b.update(obs, w);
    b.update(obs, w);
    Eigen::MatrixXd cand(5, 3);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 3; ++j) cand(i, j) = rng.uniform();
    Eigen::Index ia, ib;
    (cand * a.theta_hat()).maxCoeff(&ia);
    (cand * b.theta_hat()).maxCoeff(&ib);
    CHECK(ia == ib);
  }
  CHECK_THROWS_AS(LinearModelState(2, 1.0).confidence_radius(0.0), Error);
  LinearModelState st(2, 1.0);
  Eigen::MatrixXd x3(1, 3);
  x3.setOnes();
  CHECK_THROWS_AS(linucb_estimate(st, features_from_rows(x3), 0.05), Error);
}

TEST_CASE("linthompson sampling") {
  SUBCASE("zero scale returns theta_hat") {
    LinearModelState st(2, 1.0);
    Eigen::MatrixXd obs(1, 2);
    obs << 1, 1;
    std::vector<double> w{1};
    st.update(obs, w);
    Rng rng(12);
    CHECK(st.sample_theta(0.0, rng) == st.theta_hat());
  }
  SUBCASE("d=1, gram=4, v=1 has variance 1/4") {
    LinearModelState st(1, 4.0);
    Rng rng(13);
    const int n = 100000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double t = st.sample_theta(1.0, rng)[0];
      sum += t;
      sq += t * t;
    }
    const double var = sq / n - (sum / n) * (sum / n);
    // Sample variance of a normal has sd sigma^2 sqrt(2/n).
    CHECK(std::abs(var - 0.25) < 3 * 0.25 * std::sqrt(2.0 / n));
  }
  SUBCASE("fixed stream is reproducible") {
    LinearModelState st(3, 1.0);
    Eigen::MatrixXd x(4, 3);
    x.setRandom();
    Rng a(14), b(14);
    CHECK(linthompson_sample(st, features_from_rows(x), 0.7, a) ==
          linthompson_sample(st, features_from_rows(x), 0.7, b));
  }
  CHECK(thompson_scale(0.5, 10, 1, 0.05) == doctest::Approx(0.5 * std::sqrt(90 * std::log(20.0))));
  CHECK(thompson_scale(0.5, 10, 0, 0.05) == 0.0);
}

TEST_CASE("linthompson-ucb") {
  Rng seed(15);
  LinearModelState st(3, 1.0);
  Eigen::MatrixXd obs(10, 3);
  std::vector<double> w(10);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 3; ++j) obs(i, j) = seed.uniform();
    w[i] = seed.bernoulli(0.4);
  }
  st.update(obs, w);
  Eigen::MatrixXd x(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = seed.uniform(0, 0.3);
  auto f = features_from_rows(x);

  SUBCASE("zero scale equals linucb") {
    Rng rng(16);
    CHECK(linthompson_ucb_estimate(st, f, 0.05, 0.0, rng) == linucb_estimate(st, f, 0.05));
  }
  SUBCASE("zero scale and zero features give zero") {
    Rng rng(17);
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 3);
    auto est = linthompson_ucb_estimate(st, features_from_rows(zero), 0.05, 0.0, rng);
    CHECK(est == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("initial state closed form") {
    LinearModelState init(3, 2.0);
    Rng a(18), b(18);
    const double scale = 0.4;
    auto est = linthompson_ucb_estimate(init, f, 0.05, scale, a);
    // theta~ = scale * z / sqrt(lambda); beta at det = lambda^d is sqrt(lambda) + sqrt(-2 log delta).
    std::vector<double> z(3);
    for (double& v : z) v = b.normal();
    const double beta = std::sqrt(2.0) + std::sqrt(-2.0 * std::log(0.05));
    for (int i = 0; i < 4; ++i) {
      double mean = 0, norm2 = 0;
      for (int j = 0; j < 3; ++j) {
        mean += x(i, j) * scale * z[j] / std::sqrt(2.0);
        norm2 += x(i, j) * x(i, j);
      }
      const double expect = std::clamp(mean + beta * std::sqrt(norm2 / 2.0), 0.0, 1.0);
      CHECK(est[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("every strategy keeps estimates in [0,1] through a short run") {
  auto g = generate_preferential_attachment(30, 2, 19);
  auto features = laplacian_features(g, 4);
  std::vector<double> truth(g.edge_count(), 0.3);
  RoundContext ctx;
  ctx.graph = &g;
  ctx.features = &features;
  StrategyParams params;
  for (const auto& name : base_strategy_names()) {
    CAPTURE(name);
    auto s = make_strategy(name, g.edge_count(), 4, params);
    CHECK(s->name() == name);
    Rng rng(20);
    for (std::size_t t = 1; t <= 15; ++t) {
      ctx.round = t;
      auto est = s->estimate(ctx, rng);
      CHECK(est.size() == g.edge_count());
      CHECK(all_in_unit(est));
      std::vector<NodeId> seeds{static_cast<NodeId>(rng.below(30))};
      s->observe(ctx, simulate_cascade(g, truth, seeds, rng), rng);
    }
  }
}

TEST_CASE("strategy factory validation") {
  StrategyParams params;
  CHECK_THROWS_AS(make_strategy("nope", 3, 2, params), Error);
  params.explore_hi = 0.0;
  CHECK_THROWS_AS(make_strategy("explore_rand", 3, 2, params), Error);
  params = {};
  params.linear_target = "other";
  CHECK_THROWS_AS(make_strategy("imlinucb", 3, 2, params), Error);
  params = {};
  auto lin = make_strategy("linthompson", 3, 2, params);
  CHECK(lin->needs_features());
  RoundContext ctx;
  Rng rng(21);
  CHECK_THROWS_AS(lin->estimate(ctx, rng), Error);
}

}  // TEST_SUITE
