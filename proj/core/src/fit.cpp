#include "netshift/fit.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "netshift/description_length.hpp"
#include "netshift/likelihood.hpp"
#include "netshift/random.hpp"

namespace netshift {
namespace {

double parameter_change(const BlockModel& a, const BlockModel& b) {
  double change = 0.0;
  for (std::size_t r = 0; r < a.n.size(); ++r) change = std::max(change, std::abs(a.n[r] - b.n[r]));
  const auto qa = a.Q.values();
  const auto qb = b.Q.values();
  for (std::size_t i = 0; i < qa.size(); ++i) change = std::max(change, std::abs(qa[i] - qb[i]));
  return change;
}

struct RestartOutcome {
  BlockModel model;
  MessageState messages;
  Partition partition;
  double log_likelihood = 0.0;
  bool converged = false;
  std::size_t sweeps = 0;
};

BlockModel initial_model(const MultiGraph& graph, std::size_t k, Family family, bool corrected,
                         const MessageState& state, const std::optional<BlockMatrix>& contrast = {}) {
  const double density =
      graph.pair_capacity() > 0.0 ? graph.total_multiplicity() / graph.pair_capacity() : 0.0;
  BlockModel model;
  model.family = family;
  model.n.assign(k, 1.0 / static_cast<double>(k));
  model.Q = BlockMatrix(k, family == Family::bernoulli ? std::min(density, 1.0) : density);
  if (corrected) model.degree_correction = apply_degree_correction(graph, map_partition(state));
  auto estimated = estimate_parameters(graph, model, state);
  if (contrast) {
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t s = 0; s < k; ++s) {
        estimated.Q(r, s) = clamp_rate(family, estimated.Q(r, s) * (*contrast)(r, s));
      }
    }
  }
  return estimated;
}

// Symmetric log-uniform factors in [exp(-1/4), exp(1/4)] applied to the initial rates of a
// random restart, so the first sweeps start away from the uniform fixed point.
BlockMatrix random_contrast(std::size_t k, Rng& rng) {
  BlockMatrix contrast(k, 1.0);
  std::uniform_real_distribution<double> exponent(-0.25, 0.25);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = r; s < k; ++s) {
      const double factor = std::exp(exponent(rng));
      contrast(r, s) = factor;
      contrast(s, r) = factor;
    }
  }
  return contrast;
}

// Keeps the (partition, model) pair with the highest complete-data
// log-likelihood seen so far.
void offer(RestartOutcome& best, bool& have_best, const MultiGraph& graph, const BlockModel& model,
           const MessageState& state, bool corrected) {
  auto partition = map_partition(state);
  auto candidate = model;
  if (corrected) candidate.degree_correction = apply_degree_correction(graph, partition);
  const double ll = log_likelihood(graph, partition, candidate);
  if (have_best && !(ll > best.log_likelihood)) return;
  have_best = true;
  best.log_likelihood = ll;
  best.partition = std::move(partition);
  best.model = std::move(candidate);
  best.messages = state;
}

RestartOutcome run_restart(const MultiGraph& graph, std::size_t k, Family family, bool corrected,
                           const FitOptions& options, MessageState state,
                           const std::optional<Partition>& warm_start,
                           const std::optional<BlockMatrix>& contrast) {
  const SweepOptions sweep{options.damping, options.non_edge_field};
  RestartOutcome out;
  bool have_best = false;
  if (warm_start) {
    const auto hard = messages_from_partition(graph, *warm_start, 0.0);
    offer(out, have_best, graph, initial_model(graph, k, family, corrected, hard), hard, corrected);
  }
  auto model = initial_model(graph, k, family, corrected, state, contrast);

  for (std::size_t iteration = 0; iteration < options.max_iterations; ++iteration) {
    bool messages_converged = false;
    for (std::size_t s = 0; s < options.max_sweeps; ++s) {
      ++out.sweeps;
      if (bp_sweep(graph, model, state, sweep) < options.tolerance) {
        messages_converged = true;
        break;
      }
    }
    if (corrected) model.degree_correction = apply_degree_correction(graph, map_partition(state));
    auto next = estimate_parameters(graph, model, state);
    const double change = parameter_change(model, next);
    model = std::move(next);
    offer(out, have_best, graph, model, state, corrected);
    if (messages_converged && change < options.tolerance) {
      out.converged = true;
      break;
    }
  }
  if (!have_best) offer(out, have_best, graph, model, state, corrected);
  return out;
}

}  // namespace

FitResult fit(const MultiGraph& graph, std::size_t block_count, Family family,
              bool degree_corrected, const FitOptions& options) {
  if (block_count < 1 || block_count > graph.node_count()) {
    throw std::invalid_argument("block count must lie in [1, N]");
  }
  if (options.restarts < 1) throw std::invalid_argument("at least one restart is required");
  if (options.warm_start && (options.warm_start->node_count() != graph.node_count() ||
                             options.warm_start->block_count() != block_count)) {
    throw std::invalid_argument("warm-start partition does not match the graph and block count");
  }
  // With one block every start is the same.
  const std::size_t restarts = block_count == 1 ? 1 : options.restarts;

  FitResult result;
  result.seed = options.seed;
  result.restarts = restarts;
  bool have_best = false;
  for (std::size_t i = 0; i < restarts; ++i) {
    MessageState init;
    std::optional<BlockMatrix> contrast;
    if (i == 0 && options.warm_start) {
      init = messages_from_partition(graph, *options.warm_start, options.warm_smoothing);
    } else {
      auto rng = make_rng({options.seed, i});
      init = random_messages(graph, block_count, rng);
      if (block_count > 1) contrast = random_contrast(block_count, rng);
    }
    const bool warm = i == 0 && options.warm_start.has_value();
    auto outcome = run_restart(graph, block_count, family, degree_corrected, options, std::move(init),
                               warm ? options.warm_start : std::nullopt, contrast);
    result.sweeps += outcome.sweeps;
    result.restart_log_likelihoods.push_back(outcome.log_likelihood);
    result.restart_converged.push_back(outcome.converged);
    if (!have_best || outcome.log_likelihood > result.log_likelihood) {
      have_best = true;
      result.best_restart = i;
      result.model = std::move(outcome.model);
      result.messages = std::move(outcome.messages);
      result.partition = std::move(outcome.partition);
      result.log_likelihood = outcome.log_likelihood;
      result.converged = outcome.converged;
    }
  }
  result.description_length = description_length(graph, result.partition);
  return result;
}

FitResult fit_best_k(const MultiGraph& graph, std::span<const std::size_t> k_range, Family family,
                     bool degree_corrected, const FitOptions& options) {
  if (k_range.empty()) throw std::invalid_argument("k_range must not be empty");
  std::vector<std::size_t> ks(k_range.begin(), k_range.end());
  std::ranges::sort(ks);
  std::optional<FitResult> best;
  for (auto k : ks) {
    if (k < 1 || k > graph.node_count()) throw std::invalid_argument("k_range must lie in [1, N]");
    auto options_k = options;
    if (options_k.warm_start && options_k.warm_start->block_count() != k) options_k.warm_start.reset();
    auto candidate = fit(graph, k, family, degree_corrected, options_k);
    if (!best || candidate.description_length < best->description_length) best = std::move(candidate);
  }
  return std::move(*best);
}

std::vector<std::size_t> k_range_up_to(std::size_t k_max) {
  std::vector<std::size_t> ks(k_max);
  for (std::size_t i = 0; i < k_max; ++i) ks[i] = i + 1;
  return ks;
}

}  // namespace netshift
