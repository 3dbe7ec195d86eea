#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qrc/network.hpp"
#include "qrc/types.hpp"

namespace qrc {

// Degree exponents theta and mean penalties rho of the quality-reputation
// iteration. All values lie in [0, 1].
struct QrParams {
  double theta_q = 0.0;
  double theta_r = 0.0;
  double rho_q = 0.0;
  double rho_r = 0.0;

  void validate() const;
};

// QR plus the author-credit layer. phi_a and phi_p normalize the credit sums
// by author and paper degree; lambda mixes credit into paper quality.
struct QrcParams {
  QrParams qr;
  double phi_a = 0.0;
  double phi_p = 1.0;
  double rho_a = 0.0;
  double lambda = 0.0;

  void validate() const;
};

struct ConvergenceConfig {
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;

  void validate() const;
};

struct ScoreSet {
  ScoreVector reputation{Side::User, {}};
  ScoreVector quality{Side::Item, {}};
  std::optional<ScoreVector> credit;
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

// One raw (unnormalized) sweep: maps the current iterate to the next.
using SweepFn = std::function<ScoreSet(const ScoreSet&)>;

// Applies `update` until the summed absolute change over all vectors drops
// below the tolerance on two consecutive sweeps; the iterate between them is
// returned, so `residual` is the change one further sweep would make. After every sweep each vector is L2-normalized and its
// sign is flipped if it points away from the previous iterate. Running out of
// iterations, or a sweep that annihilates a vector, returns converged=false.
ScoreSet fixed_point_iterate(const SweepFn& update, ScoreSet init,
                             const ConvergenceConfig& config);

// Uniform unit-norm starting point 1/sqrt(n) on each side.
ScoreSet uniform_start(Index n_users, Index n_items, std::optional<Index> n_authors = {});

// R = E Q, Q = E^T R (W instead of E when `weighted`).
ScoreSet bihits(const UserItemNetwork& net, bool weighted, const ConvergenceConfig& config = {});
ScoreSet bihits_from(const UserItemNetwork& net, bool weighted, ScoreSet init,
                     const ConvergenceConfig& config = {});

ScoreSet qr(const UserItemNetwork& net, const QrParams& params,
            const ConvergenceConfig& config = {});

// EigenRumor on the sqrt-degree normalized W' and P'. omega weighs the author
// contribution to item quality.
ScoreSet eigenrumor(const UserItemNetwork& net, const AuthorPaperNetwork& authors, double omega,
                    const ConvergenceConfig& config = {});

ScoreSet qrc(const UserItemNetwork& net, const AuthorPaperNetwork& authors,
             const QrcParams& params, const ConvergenceConfig& config = {});

// Labelled presets from the synthetic benchmark.
namespace presets {
inline constexpr QrParams kBiHits{0, 0, 0, 0};
inline constexpr QrParams kQr1{0, 1, 0, 0};
inline constexpr QrParams kQr2{0, 1, 1, 0};
inline constexpr QrParams kUnstable{0, 1, 1, 1};
}  // namespace presets

}  // namespace qrc
