#include "qrc/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qrc {

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << v << " outside [0, 1]";
    throw DataError(msg.str());
  }
}

// Exact for constant vectors, so centering a uniform start gives exact zeros.
double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return v.front();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Normalizes `next` in place, aligns its sign with `prev` and returns the
// summed absolute change, or nullopt when the vector cannot be normalized.
std::optional<double> settle(std::vector<double>& next, const std::vector<double>& prev) {
  const double norm = l2_norm(next);
  if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
  double dot = 0.0;
  for (std::size_t k = 0; k < next.size(); ++k) {
    next[k] /= norm;
    if (k < prev.size()) dot += next[k] * prev[k];
  }
  if (dot < 0.0) {
    for (double& x : next) x = -x;
  }
  double change = 0.0;
  for (std::size_t k = 0; k < next.size(); ++k) {
    change += std::abs(next[k] - (k < prev.size() ? prev[k] : 0.0));
  }
  return change;
}

void require_nonempty(const UserItemNetwork& net) {
  if (net.edge_count() == 0 || net.n_users() == 0 || net.n_items() == 0) {
    throw DataError("ranking requires a nonempty user-item network");
  }
}

void require_same_items(const UserItemNetwork& net, const AuthorPaperNetwork& authors) {
  if (authors.n_papers() != net.n_items()) {
    std::ostringstream msg;
    msg << "author-paper network has " << authors.n_papers() << " papers but user-item network has "
        << net.n_items() << " items";
    throw DataError(msg.str());
  }
  const auto& items = net.item_labels().labels();
  const auto& papers = authors.paper_labels().labels();
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] != papers[k]) {
      throw DataError("item " + items[k] + " does not match paper " + papers[k] +
                      " at the same index");
    }
  }
  if (authors.n_authors() == 0) throw DataError("author-paper network has no authors");
}

void attach_connectivity_warning(const UserItemNetwork& net, ScoreSet& s) {
  if (!net.graph().is_connected()) {
    s.warnings.emplace_back("user-item network is disconnected; the fixed point may depend on the start");
  }
}

// Mean-penalized aggregation. A full penalty annihilates a constant input,
// which on the first sweep is the uniform start; that sweep then uses the
// plain sum so the iteration can leave the start. Later sweeps keep the zero.
std::vector<double> penalized(const BipartiteGraph& graph, const std::vector<double>& input,
                              Part toward, double theta, double rho, double shift_mean,
                              bool first_sweep) {
  auto out = aggregate(graph, input, toward, theta, rho, shift_mean);
  if (first_sweep && rho > 0.0 &&
      std::all_of(out.begin(), out.end(), [](double x) { return x == 0.0; })) {
    out = aggregate(graph, input, toward, theta, 0.0, 0.0);
  }
  return out;
}

ScoreSet two_vector_iteration(const BipartiteGraph& graph, const QrParams& p, ScoreSet init,
                              const ConvergenceConfig& config) {
  const SweepFn sweep = [&](const ScoreSet& cur) {
    ScoreSet next;
    const bool first = cur.iterations == 0;
    next.reputation.values = penalized(graph, cur.quality.values, Part::Left, p.theta_r, p.rho_q,
                                       mean(cur.quality.values), first);
    next.quality.values = penalized(graph, cur.reputation.values, Part::Right, p.theta_q, p.rho_r,
                                    mean(cur.reputation.values), first);
    return next;
  };
  return fixed_point_iterate(sweep, std::move(init), config);
}

// Solves the credit equation alone with quality frozen at `quality`.
ScoreVector credit_readout(const BipartiteGraph& papers, const std::vector<double>& quality,
                           double phi_a, double rho_a, const ConvergenceConfig& config,
                           std::vector<std::string>& warnings) {
  ScoreSet start;
  start.credit = ScoreVector{Side::Author,
                             std::vector<double>(papers.count(Part::Left),
                                                 1.0 / std::sqrt(static_cast<double>(
                                                           papers.count(Part::Left))))};
  const SweepFn sweep = [&](const ScoreSet& cur) {
    ScoreSet next;
    next.credit = ScoreVector{Side::Author, aggregate(papers, quality, Part::Left, phi_a, rho_a,
                                                      mean(cur.credit->values))};
    return next;
  };
  ScoreSet out = fixed_point_iterate(sweep, std::move(start), config);
  if (!out.converged) warnings.emplace_back("author credit readout did not converge");
  return std::move(*out.credit);
}

}  // namespace

void QrParams::validate() const {
  check_unit_interval(theta_q, "theta_q");
  check_unit_interval(theta_r, "theta_r");
  check_unit_interval(rho_q, "rho_q");
  check_unit_interval(rho_r, "rho_r");
}

void QrcParams::validate() const {
  qr.validate();
  check_unit_interval(phi_a, "phi_a");
  check_unit_interval(phi_p, "phi_p");
  check_unit_interval(rho_a, "rho_a");
  check_unit_interval(lambda, "lambda");
}

void ConvergenceConfig::validate() const {
  if (!(tolerance > 0.0)) throw DataError("tolerance must be positive");
  if (max_iterations < 1) throw DataError("max_iterations must be at least 1");
}

ScoreSet fixed_point_iterate(const SweepFn& update, ScoreSet init,
                             const ConvergenceConfig& config) {
  config.validate();
  ScoreSet cur = std::move(init);
  cur.iterations = 0;
  cur.converged = false;
  bool candidate = false;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    ScoreSet next = update(cur);
    next.reputation.side = Side::User;
    next.quality.side = Side::Item;
    next.warnings = cur.warnings;
    next.iterations = it;

    double residual = 0.0;
    bool degenerate = false;
    auto account = [&](std::vector<double>& nv, const std::vector<double>& pv) {
      if (nv.empty() && pv.empty()) return;
      if (const auto change = settle(nv, pv)) {
        residual += *change;
      } else {
        degenerate = true;
      }
    };
    account(next.reputation.values, cur.reputation.values);
    account(next.quality.values, cur.quality.values);
    if (next.credit && cur.credit) account(next.credit->values, cur.credit->values);
    next.residual = degenerate ? std::numeric_limits<double>::infinity() : residual;

    if (degenerate) {
      next.warnings.emplace_back("a score vector collapsed to zero or overflowed");
      next.converged = false;
      return next;
    }
    const bool small = residual < config.tolerance;
    if (small && candidate) {
      // `cur` passed the test and one more sweep from it moved less than the
      // tolerance, so it is returned with that sweep's change as its residual.
      cur.residual = residual;
      cur.converged = true;
      return cur;
    }
    candidate = small;
    cur = std::move(next);
  }
  cur.converged = false;
  return cur;
}

ScoreSet uniform_start(Index n_users, Index n_items, std::optional<Index> n_authors) {
  auto uniform = [](Index n) {
    return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(n)));
  };
  ScoreSet s;
  s.reputation = {Side::User, uniform(n_users)};
  s.quality = {Side::Item, uniform(n_items)};
  if (n_authors) s.credit = ScoreVector{Side::Author, uniform(*n_authors)};
  return s;
}

ScoreSet bihits_from(const UserItemNetwork& net, bool weighted, ScoreSet init,
                     const ConvergenceConfig& config) {
  require_nonempty(net);
  if (init.reputation.size() != net.n_users() || init.quality.size() != net.n_items()) {
    throw DataError("bihits: start vectors do not match network dimensions");
  }
  attach_connectivity_warning(net, init);
  const BipartiteGraph graph = weighted ? net.graph() : net.graph().unweighted();
  return two_vector_iteration(graph, presets::kBiHits, std::move(init), config);
}

ScoreSet bihits(const UserItemNetwork& net, bool weighted, const ConvergenceConfig& config) {
  return bihits_from(net, weighted, uniform_start(net.n_users(), net.n_items()), config);
}

ScoreSet qr(const UserItemNetwork& net, const QrParams& params, const ConvergenceConfig& config) {
  params.validate();
  require_nonempty(net);
  ScoreSet init = uniform_start(net.n_users(), net.n_items());
  attach_connectivity_warning(net, init);
  return two_vector_iteration(net.graph(), params, std::move(init), config);
}

ScoreSet eigenrumor(const UserItemNetwork& net, const AuthorPaperNetwork& authors, double omega,
                    const ConvergenceConfig& config) {
  check_unit_interval(omega, "omega");
  require_nonempty(net);
  require_same_items(net, authors);
  const BipartiteGraph users = net.graph().normalized(Part::Left, 0.5);
  const BipartiteGraph papers = authors.graph().normalized(Part::Left, 0.5);

  if (omega == 0.0) {
    // Credit never feeds back; solve the user side, then read credit off.
    ScoreSet init = uniform_start(net.n_users(), net.n_items());
    attach_connectivity_warning(net, init);
    ScoreSet out = two_vector_iteration(users, presets::kBiHits, std::move(init), config);
    out.credit = credit_readout(papers, out.quality.values, 0.0, 0.0, config, out.warnings);
    return out;
  }

  ScoreSet init = uniform_start(net.n_users(), net.n_items(), authors.n_authors());
  attach_connectivity_warning(net, init);
  const SweepFn sweep = [&](const ScoreSet& cur) {
    ScoreSet next;
    next.reputation.values = aggregate(users, cur.quality.values, Part::Left, 0, 0, 0);
    next.credit = ScoreVector{Side::Author,
                              aggregate(papers, cur.quality.values, Part::Left, 0, 0, 0)};
    const auto from_users = aggregate(users, cur.reputation.values, Part::Right, 0, 0, 0);
    const auto from_authors = aggregate(papers, cur.credit->values, Part::Right, 0, 0, 0);
    next.quality.values.resize(from_users.size());
    for (std::size_t a = 0; a < from_users.size(); ++a) {
      next.quality.values[a] = omega * from_authors[a] + (1.0 - omega) * from_users[a];
    }
    return next;
  };
  return fixed_point_iterate(sweep, std::move(init), config);
}

ScoreSet qrc(const UserItemNetwork& net, const AuthorPaperNetwork& authors,
             const QrcParams& params, const ConvergenceConfig& config) {
  params.validate();
  require_nonempty(net);
  require_same_items(net, authors);
  const BipartiteGraph& users = net.graph();
  const BipartiteGraph& papers = authors.graph();

  if (params.lambda == 0.0) {
    // Credit is decoupled: quality and reputation are exactly those of QR.
    ScoreSet out = qr(net, params.qr, config);
    out.credit = credit_readout(papers, out.quality.values, params.phi_a, params.rho_a, config,
                                out.warnings);
    return out;
  }

  const QrParams& p = params.qr;
  const double lambda = params.lambda;
  ScoreSet init = uniform_start(net.n_users(), net.n_items(), authors.n_authors());
  attach_connectivity_warning(net, init);
  const SweepFn sweep = [&](const ScoreSet& cur) {
    ScoreSet next;
    const bool first = cur.iterations == 0;
    const double q_mean = mean(cur.quality.values);
    next.reputation.values =
        penalized(users, cur.quality.values, Part::Left, p.theta_r, p.rho_q, q_mean, first);
    // The credit update shifts quality by rho_a times the mean credit.
    next.credit =
        ScoreVector{Side::Author, penalized(papers, cur.quality.values, Part::Left, params.phi_a,
                                            params.rho_a, mean(cur.credit->values), first)};
    const auto from_users = penalized(users, cur.reputation.values, Part::Right, p.theta_q,
                                      p.rho_r, mean(cur.reputation.values), first);
    const auto from_authors =
        aggregate(papers, cur.credit->values, Part::Right, params.phi_p, 0.0, 0.0);
    next.quality.values.resize(from_users.size());
    for (std::size_t a = 0; a < from_users.size(); ++a) {
      next.quality.values[a] = (1.0 - lambda) * from_users[a] + lambda * from_authors[a];
    }
    return next;
  };
  return fixed_point_iterate(sweep, std::move(init), config);
}

}  // namespace qrc
