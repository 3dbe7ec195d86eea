#include "qrc/simulator.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace qrc {

namespace {

// Rejection trials per draw before switching to an exact scan of the catalog.
constexpr int kMaxRejectionTrials = 256;

bool is_linked(const std::vector<bool>& linked, Index j) {
  return j < linked.size() && linked[j];
}

double acceptance_weight(double fitness, double exponent) {
  // pow(0, 0) == 1 gives the 0^0 = 1 convention for zero-ability users.
  return std::pow(fitness, exponent);
}

std::optional<Index> draw_exact(std::span<const double> fitness, const std::vector<bool>& linked,
                                const std::vector<Index>& chosen, double exponent, Rng& rng) {
  auto excluded = [&](Index j) {
    if (is_linked(linked, j)) return true;
    for (Index c : chosen) {
      if (c == j) return true;
    }
    return false;
  };
  double total = 0.0;
  std::size_t n_candidates = 0;
  for (Index j = 0; j < fitness.size(); ++j) {
    if (excluded(j)) continue;
    ++n_candidates;
    total += acceptance_weight(fitness[j], exponent);
  }
  if (n_candidates == 0) return std::nullopt;
  if (!(total > 0.0)) {
    // All remaining weights vanish (f = 0 everywhere); fall back to uniform.
    std::uint64_t pick = rng.below(n_candidates);
    for (Index j = 0; j < fitness.size(); ++j) {
      if (excluded(j)) continue;
      if (pick-- == 0) return j;
    }
  }
  const double target = rng.uniform_closed_open() * total;
  double acc = 0.0;
  std::optional<Index> last;
  for (Index j = 0; j < fitness.size(); ++j) {
    if (excluded(j)) continue;
    acc += acceptance_weight(fitness[j], exponent);
    last = j;
    if (target < acc) return j;
  }
  return last;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  // Unbiased modulo reduction by rejection.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

void SimConfig::validate() const {
  std::ostringstream err;
  if (!(mu > 0.0 && mu <= 1.0)) err << "mu must lie in (0, 1]; ";
  if (!(x_spread >= 0.0 && x_spread <= 1.0)) err << "X must lie in [0, 1]; ";
  if (!(h > 0.0)) err << "h must be positive; ";
  if (!(p_upload >= 0.0 && p_upload <= 1.0)) err << "p_U must lie in [0, 1]; ";
  if (!(w_up > 0.0)) err << "W_up must be positive; ";
  if (!(w_down > 0.0)) err << "W_down must be positive; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw DataError("invalid simulation config: " + msg.substr(0, msg.size() - 2));
}

double sample_ability_activity(double mu, Rng& rng) {
  return std::pow(rng.uniform_open_closed(), 1.0 / mu);
}

double spawn_item(double ability, double x_spread, Rng& rng) {
  const double x = rng.uniform_closed_open() * x_spread;
  return ability + (1.0 - ability) * x;
}

std::vector<Index> select_downloads(double ability, std::span<const double> fitness,
                                    const std::vector<bool>& linked, double h, std::size_t count,
                                    Rng& rng) {
  std::vector<Index> chosen;
  if (fitness.empty()) return chosen;
  const double exponent = h * ability;
  const auto n = static_cast<std::uint64_t>(fitness.size());
  while (chosen.size() < count) {
    // Weights never exceed 1, so proposing uniformly and accepting with
    // probability f^(h a) samples the target law exactly.
    std::optional<Index> pick;
    for (int trial = 0; trial < kMaxRejectionTrials && !pick; ++trial) {
      const auto j = static_cast<Index>(rng.below(n));
      if (is_linked(linked, j)) continue;
      bool dup = false;
      for (Index c : chosen) dup = dup || c == j;
      if (dup) continue;
      if (rng.uniform_closed_open() < acceptance_weight(fitness[j], exponent)) pick = j;
    }
    if (!pick) pick = draw_exact(fitness, linked, chosen, exponent, rng);
    if (!pick) break;
    chosen.push_back(*pick);
  }
  return chosen;
}

SimResult run_simulation(const SimConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const Index n = config.n_users;

  SimResult result;
  GroundTruth& truth = result.truth;
  truth.ability.resize(n);
  truth.activity.resize(n);
  for (Index i = 0; i < n; ++i) {
    truth.ability[i] = sample_ability_activity(config.mu, rng);
    truth.activity[i] = sample_ability_activity(config.mu, rng);
  }

  std::vector<std::vector<bool>> linked(n);
  auto mark = [&](Index user, Index item) {
    auto& row = linked[user];
    if (row.size() <= item) row.resize(static_cast<std::size_t>(item) + 1, false);
    row[item] = true;
  };

  for (std::size_t step = 0; step < config.steps; ++step) {
    // Items created during this step become downloadable from the next one.
    const std::size_t visible = truth.fitness.size();
    for (Index i = 0; i < n; ++i) {
      if (!(rng.uniform_closed_open() < truth.activity[i])) continue;
      if (rng.uniform_closed_open() < config.p_upload) {
        const auto item = static_cast<Index>(truth.fitness.size());
        truth.fitness.push_back(spawn_item(truth.ability[i], config.x_spread, rng));
        truth.created_at.push_back(step);
        truth.uploader.push_back(i);
        mark(i, item);
        result.events.push_back({i, item, Action::Upload, step});
      }
      const auto picks =
          select_downloads(truth.ability[i], std::span<const double>(truth.fitness.data(), visible),
                           linked[i], config.h, config.downloads_per_step, rng);
      for (Index item : picks) {
        mark(i, item);
        result.events.push_back({i, item, Action::Download, step});
      }
    }
  }

  std::vector<UserItemEdge> edges;
  edges.reserve(result.events.size());
  for (const auto& e : result.events) {
    edges.push_back({e.user, e.item, e.action == Action::Upload ? config.w_up : config.w_down});
  }
  result.network =
      build_user_item_network(edges, n, static_cast<Index>(truth.fitness.size()));
  result.empty = edges.empty();
  return result;
}

}  // namespace qrc
