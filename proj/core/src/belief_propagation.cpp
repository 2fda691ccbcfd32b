#include "netshift/belief_propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "netshift/errors.hpp"

namespace netshift {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_pmf(Family family, Multiplicity a, double rate) {
  if (family == Family::bernoulli) {
    if (a > 1) throw std::invalid_argument("Bernoulli model needs a simple graph (multiplicity <= 1)");
    return a == 1 ? std::log(rate) : std::log1p(-rate);
  }
  return a * std::log(rate) - rate;
}

// Pair factors P(a | rate_rs) for a linked pair, row-major with r the block of
// the first node. Each table is scaled by a constant that cancels in every
// normalized quantity. Plain models reuse one table per multiplicity.
class PairFactors {
 public:
  PairFactors(const BlockModel& model, Multiplicity max_multiplicity)
      : model_(model), k_(model.block_count()), corrected_(model.degree_corrected()) {
    if (!corrected_) {
      tables_.resize(static_cast<std::size_t>(max_multiplicity) + 1);
      for (Multiplicity a = 0; a <= max_multiplicity; ++a) {
        auto& table = tables_[a];
        table.resize(k_ * k_);
        for (std::size_t i = 0; i < k_ * k_; ++i) {
          table[i] = log_pmf(model.family, a, clamp_rate(model.family, model.Q.values()[i]));
        }
        exp_shifted(table);
      }
      return;
    }
    const auto& w = model.degree_correction->weight;
    log_weight_.resize(w.size());
    for (std::size_t u = 0; u < w.size(); ++u) log_weight_[u] = std::log(std::max(w[u], kTiny));
    log_q_.resize(k_ * k_);
    for (std::size_t i = 0; i < k_ * k_; ++i) log_q_[i] = std::log(std::max(model.Q.values()[i], kTiny));
    scratch_.resize(k_ * k_);
  }

  std::span<const double> operator()(NodeId u, NodeId v, Multiplicity a) {
    if (!corrected_) return tables_[a];
    const auto& w = model_.degree_correction->weight;
    const double ww = w[u] * w[v];
    if (model_.family == Family::poisson) {
      // a * ln(Q_rs w_u w_v) - Q_rs w_u w_v with the a * ln(w_u w_v) part dropped.
      const double shift = log_weight_[u] + log_weight_[v];
      for (std::size_t i = 0; i < k_ * k_; ++i) {
        const double rate = model_.Q.values()[i] * ww;
        scratch_[i] = rate >= kPoissonFloor ? a * log_q_[i] - rate
                                            : a * (std::log(kPoissonFloor) - shift) - kPoissonFloor;
      }
    } else {
      for (std::size_t r = 0; r < k_; ++r) {
        for (std::size_t s = 0; s < k_; ++s) {
          scratch_[r * k_ + s] = log_pmf(model_.family, a, model_.pair_rate(r, s, u, v));
        }
      }
    }
    exp_shifted(scratch_);
    return scratch_;
  }

 private:
  static void exp_shifted(std::vector<double>& logs) {
    double top = kNegInf;
    for (double x : logs) top = std::max(top, x);
    for (auto& x : logs) x = std::exp(x - top);
  }

  const BlockModel& model_;
  std::size_t k_;
  bool corrected_;
  std::vector<std::vector<double>> tables_;
  std::vector<double> log_weight_, log_q_, scratch_;
};

// Scales v[0..k) to a maximum of one once that maximum drops below 1e-8; returns
// false when every entry is zero or not finite. Factors lie in (1e-300, 1], so
// one more product cannot leave the normal range.
template <std::size_t KS>
bool rescale_if_small(double* v, std::size_t dynamic_k) {
  const std::size_t k = KS != 0 ? KS : dynamic_k;
  double top = 0.0;
  for (std::size_t r = 0; r < k; ++r) top = std::max(top, v[r]);
  if (top >= 1e-8 && top <= 1.0) return true;
  if (!(top > 0.0) || !std::isfinite(top)) return false;
  const double inv = 1.0 / top;
  for (std::size_t r = 0; r < k; ++r) v[r] *= inv;
  return true;
}

template <std::size_t KS>
bool normalize(double* v, std::size_t dynamic_k) {
  const std::size_t k = KS != 0 ? KS : dynamic_k;
  double z = 0.0;
  for (std::size_t r = 0; r < k; ++r) z += v[r];
  if (!(z > 0.0) || !std::isfinite(z)) return false;
  const double inv = 1.0 / z;
  for (std::size_t r = 0; r < k; ++r) v[r] *= inv;
  return true;
}

void check_state(const MultiGraph& graph, std::size_t k, const MessageState& state) {
  if (k == 0) throw std::invalid_argument("block count must be positive");
  if (state.block_count != k || state.messages.size() != graph.slot_count() * k ||
      state.marginals.size() != graph.node_count() * k) {
    throw std::invalid_argument("message state does not match the graph and block count");
  }
}

MessageState allocate(const MultiGraph& graph, std::size_t k) {
  if (k == 0) throw std::invalid_argument("block count must be positive");
  MessageState state;
  state.block_count = k;
  state.messages.assign(graph.slot_count() * k, 0.0);
  state.marginals.assign(graph.node_count() * k, 0.0);
  return state;
}

void copy_marginal_to_messages(const MultiGraph& graph, MessageState& state) {
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto src = state.marginal(u);
    for (auto e = graph.row_begin(u); e < graph.row_end(u); ++e) {
      std::ranges::copy(src, state.message(e).begin());
    }
  }
}

}  // namespace

MessageState uniform_messages(const MultiGraph& graph, std::size_t block_count) {
  auto state = allocate(graph, block_count);
  std::ranges::fill(state.messages, 1.0 / static_cast<double>(block_count));
  std::ranges::fill(state.marginals, 1.0 / static_cast<double>(block_count));
  return state;
}

MessageState random_messages(const MultiGraph& graph, std::size_t block_count, Rng& rng) {
  auto state = allocate(graph, block_count);
  std::exponential_distribution<double> unit(1.0);
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    auto psi = state.marginal(u);
    double z = 0.0;
    for (auto& x : psi) {
      x = unit(rng);
      z += x;
    }
    for (auto& x : psi) x /= z;
  }
  copy_marginal_to_messages(graph, state);
  return state;
}

MessageState messages_from_partition(const MultiGraph& graph, const Partition& partition,
                                     double smoothing) {
  if (partition.node_count() != graph.node_count()) {
    throw std::invalid_argument("partition and graph disagree on node count");
  }
  if (smoothing < 0.0 || smoothing > 1.0) throw std::invalid_argument("smoothing must lie in [0, 1]");
  const auto k = partition.block_count();
  auto state = allocate(graph, k);
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    auto psi = state.marginal(u);
    std::ranges::fill(psi, smoothing / static_cast<double>(k));
    psi[partition[u]] += 1.0 - smoothing;
  }
  copy_marginal_to_messages(graph, state);
  return state;
}

Partition map_partition(const MessageState& state) {
  const auto k = state.block_count;
  const auto n = k == 0 ? 0 : state.marginals.size() / k;
  std::vector<BlockId> labels(n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto psi = state.marginal(u);
    labels[u] = static_cast<BlockId>(std::ranges::max_element(psi) - psi.begin());
  }
  return Partition(std::move(labels), k);
}

namespace {

// Block loops take their bound from KS when it is non-zero, so small K unrolls.
template <std::size_t KS>
double sweep_impl(const MultiGraph& graph, const BlockModel& model, MessageState& state,
                  const SweepOptions& options) {
  const std::size_t k = KS != 0 ? KS : model.block_count();
  const auto n = graph.node_count();
  const bool dc = model.degree_corrected();
  const std::vector<double>* weight = dc ? &model.degree_correction->weight : nullptr;
  PairFactors pair_factors(model, graph.max_multiplicity());

  // Field of unlinked pairs. Plain models keep ell[w][r] = ln sum_s P(0|Q_sr) psi^w_s
  // and node u's log-weight gains H - ell[u] - sum over neighbours of ell[w].
  // Degree-corrected models use the first-order form -w_u * (H - ell[u] - ...)
  // with ell[w][r] = w_w * sum_s Q_sr psi^w_s.
  std::vector<double> ell;
  std::vector<double> field(k, 0.0);
  std::vector<double> absent;
  if (!dc && options.non_edge_field) {
    absent.resize(k * k);
    for (std::size_t i = 0; i < k * k; ++i) {
      absent[i] = std::exp(log_pmf(model.family, 0, clamp_rate(model.family, model.Q.values()[i])));
    }
  }
  auto node_field = [&](std::size_t w, std::span<double> out) {
    const auto psi = state.marginal(w);
    for (std::size_t r = 0; r < k; ++r) {
      double acc = 0.0;
      if (dc) {
        for (std::size_t s = 0; s < k; ++s) acc += model.Q(s, r) * psi[s];
        out[r] = (*weight)[w] * acc;
      } else {
        for (std::size_t s = 0; s < k; ++s) acc += absent[s * k + r] * psi[s];
        out[r] = std::log(std::max(acc, kTiny));
      }
    }
  };
  if (options.non_edge_field) {
    ell.assign(n * k, 0.0);
    for (std::size_t w = 0; w < n; ++w) {
      std::span<double> row(ell.data() + w * k, k);
      node_field(w, row);
      for (std::size_t r = 0; r < k; ++r) field[r] += row[r];
    }
  }

  std::vector<double> log_prior(k);
  for (std::size_t r = 0; r < k; ++r) log_prior[r] = model.n[r] > 0.0 ? std::log(model.n[r]) : kNegInf;

  // factors[i] is the incoming factor of neighbour i; prefix[i] and suffix[i]
  // hold the products over neighbours before and from i, so the cavity product
  // excluding i is prefix[i] * suffix[i + 1]. All vectors are kept at maximum one.
  std::vector<double> logits(k), fresh(k), factors, prefix, suffix;
  double max_change = 0.0;

  for (NodeId u = 0; u < n; ++u) {
    const auto begin = graph.row_begin(u);
    const auto degree = graph.row_end(u) - begin;
    factors.resize(degree * k);
    prefix.resize((degree + 1) * k);
    suffix.resize((degree + 1) * k);

    logits = log_prior;
    if (options.non_edge_field) {
      const double* own = ell.data() + static_cast<std::size_t>(u) * k;
      for (std::size_t r = 0; r < k; ++r) {
        const double rest = field[r] - own[r];
        logits[r] += dc ? -(*weight)[u] * rest : rest;
      }
      for (std::size_t i = 0; i < degree; ++i) {
        const double* other = ell.data() + static_cast<std::size_t>(graph.target(begin + i)) * k;
        for (std::size_t r = 0; r < k; ++r) logits[r] += dc ? (*weight)[u] * other[r] : -other[r];
      }
    }
    {
      double top = kNegInf;
      for (double x : logits) top = std::max(top, x);
      if (!std::isfinite(top)) throw NumericalError("marginal normalizer vanished at node " + std::to_string(u));
      for (std::size_t r = 0; r < k; ++r) prefix[r] = std::exp(logits[r] - top);
    }

    for (std::size_t i = 0; i < degree; ++i) {
      const auto e = begin + i;
      const auto table = pair_factors(graph.target(e), u, graph.multiplicity(e));
      const auto incoming = state.message(graph.reverse(e));
      std::span<double> f(factors.data() + i * k, k);
      for (std::size_t r = 0; r < k; ++r) {
        double acc = 0.0;
        for (std::size_t s = 0; s < k; ++s) acc += table[s * k + r] * incoming[s];
        f[r] = std::max(acc, kTiny);
      }
      std::span<double> next(prefix.data() + (i + 1) * k, k);
      for (std::size_t r = 0; r < k; ++r) next[r] = prefix[i * k + r] * f[r];
      if (!rescale_if_small<KS>(next.data(), k)) throw NumericalError("marginal normalizer vanished at node " + std::to_string(u));
    }
    std::fill(suffix.begin() + static_cast<std::ptrdiff_t>(degree * k), suffix.end(), 1.0);
    for (std::size_t i = degree; i-- > 0;) {
      std::span<double> here(suffix.data() + i * k, k);
      for (std::size_t r = 0; r < k; ++r) here[r] = suffix[(i + 1) * k + r] * factors[i * k + r];
      rescale_if_small<KS>(here.data(), k);
    }

    auto psi = state.marginal(u);
    std::copy_n(prefix.data() + degree * k, k, fresh.begin());
    if (!normalize<KS>(fresh.data(), k)) throw NumericalError("marginal normalizer vanished at node " + std::to_string(u));
    for (std::size_t r = 0; r < k; ++r) {
      max_change = std::max(max_change, std::abs(fresh[r] - psi[r]));
      psi[r] = fresh[r];
    }

    for (std::size_t i = 0; i < degree; ++i) {
      for (std::size_t r = 0; r < k; ++r) fresh[r] = prefix[i * k + r] * suffix[(i + 1) * k + r];
      if (!normalize<KS>(fresh.data(), k)) throw NumericalError("message normalizer vanished at node " + std::to_string(u));
      auto out = state.message(begin + i);
      for (std::size_t r = 0; r < k; ++r) {
        max_change = std::max(max_change, std::abs(fresh[r] - out[r]));
        out[r] = (1.0 - options.damping) * out[r] + options.damping * fresh[r];
      }
    }

    if (options.non_edge_field) {
      std::span<double> own(ell.data() + static_cast<std::size_t>(u) * k, k);
      for (std::size_t r = 0; r < k; ++r) field[r] -= own[r];
      node_field(u, own);
      for (std::size_t r = 0; r < k; ++r) field[r] += own[r];
    }
  }
  return max_change;
}

template <std::size_t KS>
BlockModel estimate_impl(const MultiGraph& graph, const BlockModel& current,
                         const MessageState& state) {
  const std::size_t k = KS != 0 ? KS : current.block_count();
  const auto n = graph.node_count();
  const bool dc = current.degree_corrected();

  // self_pairs(r, s) removes the u = v terms from weighted[r] * weighted[s].
  std::vector<double> mass(k, 0.0), weighted(k, 0.0);
  BlockMatrix self_pairs(k);
  for (std::size_t u = 0; u < n; ++u) {
    const double w = dc ? current.degree_correction->weight[u] : 1.0;
    const auto psi = state.marginal(u);
    for (std::size_t r = 0; r < k; ++r) {
      mass[r] += psi[r];
      weighted[r] += psi[r] * w;
      for (std::size_t s = 0; s < k; ++s) self_pairs(r, s) += psi[r] * psi[s] * w * w;
    }
  }

  BlockMatrix expected_links(k);
  PairFactors pair_factors(current, graph.max_multiplicity());
  std::vector<double> joint(k * k);
  for (NodeId u = 0; u < n; ++u) {
    for (auto e = graph.row_begin(u); e < graph.row_end(u); ++e) {
      const auto v = graph.target(e);
      const auto a = graph.multiplicity(e);
      const auto table = pair_factors(u, v, a);
      const auto from_u = state.message(e);
      const auto from_v = state.message(graph.reverse(e));
      double z = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t s = 0; s < k; ++s) {
          joint[r * k + s] = table[r * k + s] * from_u[r] * from_v[s];
          z += joint[r * k + s];
        }
      }
      if (!(z > 0.0)) throw NumericalError("pair normalizer vanished");
      const double scale = a / z;
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t s = 0; s < k; ++s) expected_links(r, s) += scale * joint[r * k + s];
      }
    }
  }

  const double density = graph.pair_capacity() > 0.0
                             ? static_cast<double>(graph.total_multiplicity()) / graph.pair_capacity()
                             : 0.0;
  BlockModel next = current;
  next.n.assign(k, 0.0);
  next.Q = BlockMatrix(k);
  constexpr double kEmpty = 1e-12;
  std::vector<bool> empty(k);
  for (std::size_t r = 0; r < k; ++r) {
    empty[r] = mass[r] < kEmpty;
    next.n[r] = empty[r] ? kEmpty : mass[r] / static_cast<double>(n);
  }
  double total = 0.0;
  for (double x : next.n) total += x;
  for (auto& x : next.n) x /= total;

  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = r; s < k; ++s) {
      double q = density;
      if (!empty[r] && !empty[s]) {
        const double denom = weighted[r] * weighted[s] - self_pairs(r, s);
        if (denom >= kEmpty) {
          q = 0.5 * (expected_links(r, s) + expected_links(s, r)) / denom;
        }
      }
      if (current.family == Family::bernoulli) q = std::min(q, 1.0);
      next.Q(r, s) = next.Q(s, r) = std::max(q, 0.0);
    }
  }
  return next;
}

template <class Fn>
decltype(auto) dispatch_block_count(std::size_t k, Fn&& fn) {
  switch (k) {
    case 1: return fn(std::integral_constant<std::size_t, 1>{});
    case 2: return fn(std::integral_constant<std::size_t, 2>{});
    case 3: return fn(std::integral_constant<std::size_t, 3>{});
    case 4: return fn(std::integral_constant<std::size_t, 4>{});
    default: return fn(std::integral_constant<std::size_t, 0>{});
  }
}

void check_weights(const MultiGraph& graph, const BlockModel& model) {
  if (model.degree_correction && model.degree_correction->weight.size() != graph.node_count()) {
    throw std::invalid_argument("degree-correction factors do not match the graph");
  }
}

}  // namespace

double bp_sweep(const MultiGraph& graph, const BlockModel& model, MessageState& state,
                const SweepOptions& options) {
  check_state(graph, model.block_count(), state);
  check_weights(graph, model);
  if (options.damping <= 0.0 || options.damping > 1.0) {
    throw std::invalid_argument("damping must lie in (0, 1]");
  }
  return dispatch_block_count(model.block_count(), [&](auto ks) {
    return sweep_impl<decltype(ks)::value>(graph, model, state, options);
  });
}

BlockModel estimate_parameters(const MultiGraph& graph, const BlockModel& current,
                               const MessageState& state) {
  check_state(graph, current.block_count(), state);
  check_weights(graph, current);
  return dispatch_block_count(current.block_count(), [&](auto ks) {
    return estimate_impl<decltype(ks)::value>(graph, current, state);
  });
}

}  // namespace netshift
