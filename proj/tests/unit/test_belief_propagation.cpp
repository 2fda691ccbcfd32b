#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <netshift/belief_propagation.hpp>
#include <netshift/random.hpp>

#include "generators.hpp"
#include "oracles.hpp"

namespace netshift {
namespace {

double run_to_convergence(const MultiGraph& g, const BlockModel& model, MessageState& state,
                          const SweepOptions& options, double tolerance = 1e-13, std::size_t max_sweeps = 5000) {
  double change = 0.0;
  for (std::size_t i = 0; i < max_sweeps; ++i) {
    change = bp_sweep(g, model, state, options);
    if (change < tolerance) break;
  }
  return change;
}

double max_difference(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TEST(BeliefPropagation, SingleBlockIsTrivial) {
  auto rng = make_rng({31});
  const auto g = testing::random_multigraph(rng, 10, 0.3);
  const BlockModel model{Family::bernoulli, {1.0}, BlockMatrix(1, 0.3), std::nullopt};
  auto state = uniform_messages(g, 1);
  EXPECT_EQ(bp_sweep(g, model, state), 0.0);
  for (double m : state.messages) EXPECT_EQ(m, 1.0);
  for (double m : state.marginals) EXPECT_EQ(m, 1.0);
}

TEST(BeliefPropagation, IsolatedPairStaysAtSymmetricFixedPoint) {
  const MultiGraph g(2, {});
  const BlockModel model{Family::bernoulli, {0.5, 0.5}, BlockMatrix{{0.3, 0.1}, {0.1, 0.3}}, std::nullopt};
  auto state = uniform_messages(g, 2);
  for (int i = 0; i < 5; ++i) bp_sweep(g, model, state);
  for (double m : state.marginals) EXPECT_NEAR(m, 0.5, 1e-15);
}

TEST(BeliefPropagation, PathOfFourMatchesEnumeration) {
  const MultiGraph g(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}});
  const BlockModel model{Family::bernoulli, {0.4, 0.6}, BlockMatrix{{0.7, 0.2}, {0.2, 0.5}}, std::nullopt};
  auto rng = make_rng({32});
  auto state = random_messages(g, 2, rng);
  run_to_convergence(g, model, state, {.damping = 0.7, .non_edge_field = false});
  const auto exact = testing::enumerated_marginals(g, model);
  EXPECT_LT(max_difference(state.marginals, exact), 1e-6);
}

TEST(BeliefPropagation, RandomTreesMatchEnumeration) {
  auto rng = make_rng({33});
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = testing::uniform_int(rng, 2, 9);
    const auto k = testing::uniform_int(rng, 2, 3);
    const auto family = trial % 2 == 0 ? Family::bernoulli : Family::poisson;
    const auto g = testing::random_tree(rng, n, family == Family::poisson ? 3 : 1);
    const auto model = testing::random_model(rng, k, family, 0.05, family == Family::poisson ? 3.0 : 0.95);
    auto state = random_messages(g, k, rng);
    run_to_convergence(g, model, state, {.damping = 0.7, .non_edge_field = false});
    EXPECT_LT(max_difference(state.marginals, testing::enumerated_marginals(g, model)), 1e-6) << "trial " << trial;
  }
}

TEST(BeliefPropagation, MessagesStayNormalised) {
  auto rng = make_rng({34});
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = testing::uniform_int(rng, 5, 40);
    const auto k = testing::uniform_int(rng, 1, 5);
    const auto g = testing::random_multigraph(rng, n, 0.15, 2);
    const auto model = testing::random_model(rng, k, Family::poisson, 0.01, 0.5);
    auto state = random_messages(g, k, rng);
    for (int i = 0; i < 5; ++i) bp_sweep(g, model, state);
    for (std::size_t slot = 0; slot < g.slot_count(); ++slot) {
      double total = 0.0;
      for (double m : state.message(slot)) {
        EXPECT_GE(m, 0.0);
        total += m;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
    for (std::size_t u = 0; u < n; ++u) {
      double total = 0.0;
      for (double m : state.marginal(u)) total += m;
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(BeliefPropagation, StorageIsLinearInLinks) {
  auto rng = make_rng({35});
  const auto g = testing::random_multigraph(rng, 60, 0.05);
  const auto state = uniform_messages(g, 3);
  EXPECT_EQ(state.stored_values(), (2 * g.pair_count() + g.node_count()) * 3);
}

TEST(BeliefPropagation, MapPartitionBreaksTiesLow) {
  const MultiGraph g(3, {});
  MessageState state = uniform_messages(g, 2);
  state.marginals = {0.5, 0.5, 0.2, 0.8, 0.9, 0.1};
  EXPECT_EQ(map_partition(state), Partition({0, 1, 0}, 2));
}

TEST(Estimate, ConcentratedMarginalsGiveDegeneratePrior) {
  auto rng = make_rng({36});
  const auto g = testing::random_multigraph(rng, 12, 0.3);
  const BlockModel model{Family::bernoulli, {0.5, 0.5}, BlockMatrix(2, 0.2), std::nullopt};
  const auto state = messages_from_partition(g, Partition(std::vector<BlockId>(12, 0), 2), 0.0);
  const auto next = estimate_parameters(g, model, state);
  EXPECT_NEAR(next.n[0], 1.0, 1e-9);
  EXPECT_NEAR(next.n[1], 0.0, 1e-9);
}

TEST(Estimate, SingleBlockGivesDensity) {
  auto rng = make_rng({37});
  const auto g = testing::random_multigraph(rng, 15, 0.25);
  const BlockModel model{Family::bernoulli, {1.0}, BlockMatrix(1, 0.5), std::nullopt};
  const auto next = estimate_parameters(g, model, uniform_messages(g, 1));
  EXPECT_NEAR(next.Q(0, 0), static_cast<double>(g.total_multiplicity()) / g.pair_capacity(), 1e-12);
  EXPECT_DOUBLE_EQ(next.n[0], 1.0);
}

TEST(Estimate, OneHotMessagesGiveBlockDensities) {
  auto rng = make_rng({38});
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = testing::uniform_int(rng, 6, 25);
    const auto g = testing::random_multigraph(rng, n, 0.3, 3);
    std::vector<BlockId> labels(n);
    for (std::size_t u = 0; u < n; ++u) labels[u] = static_cast<BlockId>(u % 3);
    const Partition p(labels, 3);
    const auto model = testing::random_model(rng, 3, Family::poisson, 0.1, 1.0);
    const auto next = estimate_parameters(g, model, messages_from_partition(g, p, 0.0));
    const auto counts = block_counts(g, p);
    for (std::size_t r = 0; r < 3; ++r) {
      EXPECT_NEAR(next.n[r], counts.nodes[r] / static_cast<double>(n), 1e-12);
      for (std::size_t s = 0; s < 3; ++s) {
        EXPECT_NEAR(next.Q(r, s), counts.links(r, s) / counts.pairs(r, s), 1e-12);
      }
    }
  }
}

TEST(Estimate, MatchesAllOrderedPairSumsForHandSetMessages) {
  const MultiGraph g(6, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}});
  const BlockModel model{Family::bernoulli, {0.45, 0.55}, BlockMatrix{{0.4, 0.1}, {0.1, 0.35}}, std::nullopt};
  auto state = uniform_messages(g, 2);
  const double marginal[6] = {0.9, 0.8, 0.7, 0.35, 0.2, 0.15};
  for (std::size_t u = 0; u < 6; ++u) {
    state.marginals[u * 2] = marginal[u];
    state.marginals[u * 2 + 1] = 1.0 - marginal[u];
  }
  for (std::size_t slot = 0; slot < g.slot_count(); ++slot) {
    const double m = 0.1 + 0.8 * static_cast<double>((slot * 7) % 11) / 10.0;
    state.messages[slot * 2] = m;
    state.messages[slot * 2 + 1] = 1.0 - m;
  }
  const auto sparse = estimate_parameters(g, model, state);
  const auto dense = testing::dense_estimate(g, model, testing::dense_from_sparse(g, state));
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_NEAR(sparse.n[r], dense.n[r], 1e-9);
    for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(sparse.Q(r, s), dense.Q(r, s), 1e-9);
  }
}

TEST(Estimate, MatchesAllOrderedPairSumsUnderDegreeCorrection) {
  auto rng = make_rng({39});
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = testing::uniform_int(rng, 6, 20);
    const auto g = testing::random_multigraph(rng, n, 0.3, 2);
    auto model = testing::random_model(rng, 2, Family::poisson, 0.05, 0.5);
    auto state = random_messages(g, 2, rng);
    for (int i = 0; i < 3; ++i) bp_sweep(g, model, state);
    model.degree_correction = apply_degree_correction(g, map_partition(state));
    const auto sparse = estimate_parameters(g, model, state);
    const auto dense = testing::dense_estimate(g, model, testing::dense_from_sparse(g, state));
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(sparse.Q(r, s), dense.Q(r, s), 1e-9);
    }
  }
}

}  // namespace
}  // namespace netshift
