#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qrc/network.hpp"

namespace qrc {

// Seeded 64-bit Mersenne Twister with a portable mapping to (0, 1].
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1], 53 bits of resolution.
  double uniform_open_closed() { return 1.0 - uniform_closed_open(); }
  // Uniform on [0, 1).
  double uniform_closed_open() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

enum class Action { Upload, Download, View };

struct SimConfig {
  Index n_users = 1000;
  double mu = 0.5;          // shape of p(x) = mu x^(mu-1)
  double x_spread = 0.5;    // X in f = a + (1-a) U[0, X]
  double h = 5.0;           // selectivity exponent
  double p_upload = 0.1;
  std::size_t steps = 200;
  double w_up = 1.0;
  double w_down = 0.1;
  std::size_t downloads_per_step = 2;
  std::uint64_t seed = 1;

  void validate() const;
  // xi = W_down / W_up.
  double weight_ratio() const { return w_down / w_up; }
};

struct GroundTruth {
  std::vector<double> ability;
  std::vector<double> activity;
  std::vector<double> fitness;
  std::vector<std::size_t> created_at;
  std::vector<Index> uploader;
};

struct SimEvent {
  Index user = 0;
  Index item = 0;
  Action action = Action::Download;
  std::size_t step = 0;
};

struct SimResult {
  UserItemNetwork network;
  GroundTruth truth;
  std::vector<SimEvent> events;  // generation order, one per edge
  bool empty = false;            // no edges were produced
};

// Inverse-CDF draw from p(x) = mu x^(mu-1) on [0, 1].
double sample_ability_activity(double mu, Rng& rng);

// f = a + (1 - a) x with x ~ U[0, X].
double spawn_item(double ability, double x_spread, Rng& rng);

// Draws up to `count` distinct items from the first `fitness.size()` catalog
// entries, skipping any marked in `linked`, each with probability
// proportional to f^(h a). Sequential draws with renormalization.
std::vector<Index> select_downloads(double ability, std::span<const double> fitness,
                                    const std::vector<bool>& linked, double h, std::size_t count,
                                    Rng& rng);

SimResult run_simulation(const SimConfig& config);

}  // namespace qrc
