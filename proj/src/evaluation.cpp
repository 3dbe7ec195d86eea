#include "qrc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>

namespace qrc {

Estimate pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) return {std::nullopt, "length mismatch"};
  if (x.size() < 2) return {std::nullopt, "fewer than two observations"};
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) return {std::nullopt, "first argument has zero variance"};
  if (!(syy > 0.0)) return {std::nullopt, "second argument has zero variance"};
  const double r = sxy / std::sqrt(sxx * syy);
  return {std::clamp(r, -1.0, 1.0), {}};
}

CorrelationReport correlation_report(const ScoreSet& scores, const GroundTruth& truth) {
  const auto& q = scores.quality.values;
  const auto& r = scores.reputation.values;
  if (q.size() != truth.fitness.size() || q.size() != truth.created_at.size()) {
    throw DataError("quality vector does not match ground-truth item count");
  }
  if (r.size() != truth.ability.size() || r.size() != truth.activity.size()) {
    throw DataError("reputation vector does not match ground-truth user count");
  }
  std::vector<double> age(truth.created_at.begin(), truth.created_at.end());
  CorrelationReport out;
  out.quality_fitness = pearson(q, truth.fitness);
  out.reputation_ability = pearson(r, truth.ability);
  out.quality_age = pearson(q, age);
  out.reputation_activity = pearson(r, truth.activity);
  return out;
}

TopK top_k(std::span<const double> scores, std::size_t k) {
  if (k == 0) throw DataError("top_k requires k >= 1");
  std::vector<Index> ids(scores.size());
  std::iota(ids.begin(), ids.end(), Index{0});
  const auto by_score = [&](Index a, Index b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  };
  TopK out;
  out.truncated = k > ids.size();
  const std::size_t take = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                    by_score);
  ids.resize(take);
  out.ids = std::move(ids);
  return out;
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return out;
  double ss = 0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

TopKReport top_k_report(std::span<const Index> ranking,
                        std::span<const std::optional<PaperMetadata>> metadata) {
  if (ranking.empty()) throw DataError("top_k_report requires a nonempty ranking");
  std::vector<double> day, down, cit, impact;
  for (Index id : ranking) {
    if (id >= metadata.size() || !metadata[id]) {
      throw DataError("no metadata record for ranked paper index " + std::to_string(id));
    }
    const auto& m = *metadata[id];
    day.push_back(static_cast<double>(m.submission_day));
    down.push_back(m.downloads);
    cit.push_back(m.citations);
    impact.push_back(m.impact_factor);
  }
  TopKReport out;
  out.k = ranking.size();
  out.submission_day = mean_and_se(day);
  out.downloads = mean_and_se(down);
  out.citations = mean_and_se(cit);
  out.impact_factor = mean_and_se(impact);
  out.singleton = ranking.size() == 1;
  return out;
}

namespace {

// Midranks of the pooled sample, doubled so that they are integers.
std::vector<std::int64_t> doubled_midranks(const std::vector<double>& pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<std::int64_t> ranks(pooled.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank ((i+1) + j) / 2; doubled: i + 1 + j.
    const auto twice = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = twice;
    i = j;
  }
  return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                                 Alternative alternative, PValueMethod method) {
  if (sample_a.empty() || sample_b.empty()) {
    throw DataError("Mann-Whitney U requires two nonempty samples");
  }
  const std::size_t na = sample_a.size();
  const std::size_t nb = sample_b.size();
  const std::size_t n = na + nb;

  std::vector<double> pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  const auto ranks = doubled_midranks(pooled);

  std::int64_t observed = 0;  // twice the rank sum of sample a
  for (std::size_t k = 0; k < na; ++k) observed += ranks[k];
  const auto min_twice = static_cast<std::int64_t>(na * (na + 1));
  const auto center = static_cast<std::int64_t>(na * (n + 1));  // twice the null mean

  MannWhitneyResult out;
  out.u = static_cast<double>(observed - min_twice) / 2.0;

  const bool exact = method == PValueMethod::Exact ||
                     (method == PValueMethod::Auto && std::min(na, nb) < 8);
  out.exact = exact;

  if (exact) {
    // counts[j][s]: subsets of size j with doubled rank sum s, over the pooled
    // ranks seen so far.
    const std::int64_t max_sum = std::accumulate(ranks.begin(), ranks.end(), std::int64_t{0});
    std::vector<std::vector<double>> counts(na + 1,
                                            std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    counts[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item) {
      const auto r = static_cast<std::size_t>(ranks[item]);
      for (std::size_t j = std::min(item + 1, na); j >= 1; --j) {
        auto& dst = counts[j];
        const auto& src = counts[j - 1];
        for (std::size_t s = dst.size(); s-- > r;) dst[s] += src[s - r];
      }
    }
    const auto& dist = counts[na];
    double total = 0, tail = 0;
    const std::int64_t dev_obs = std::llabs(observed - center);
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == 0.0) continue;
      total += dist[s];
      const auto sum = static_cast<std::int64_t>(s);
      bool in_tail = false;
      switch (alternative) {
        case Alternative::TwoSided:
          in_tail = std::llabs(sum - center) >= dev_obs;
          break;
        case Alternative::Less:
          in_tail = sum <= observed;
          break;
        case Alternative::Greater:
          in_tail = sum >= observed;
          break;
      }
      if (in_tail) tail += dist[s];
    }
    out.p_value = std::min(1.0, tail / total);
    return out;
  }

  // Tie-corrected variance of U.
  std::map<std::int64_t, std::size_t> tie_sizes;
  for (auto r : ranks) ++tie_sizes[r];
  double tie_term = 0;
  for (const auto& [rank, t] : tie_sizes) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double dn = static_cast<double>(n);
  const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var > 0.0)) {
    out.p_value = 1.0;
    return out;
  }
  const double sd = std::sqrt(var);
  const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  const double diff = out.u - mu;
  switch (alternative) {
    case Alternative::TwoSided: {
      const double z = std::max(0.0, std::abs(diff) - 0.5) / sd;
      out.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
      break;
    }
    case Alternative::Less:
      out.p_value = std::min(1.0, normal_cdf((diff + 0.5) / sd));
      break;
    case Alternative::Greater:
      out.p_value = std::min(1.0, 1.0 - normal_cdf((diff - 0.5) / sd));
      break;
  }
  return out;
}

std::vector<DegreeRow> degree_distribution(std::span<const Index> degrees) {
  std::map<Index, std::size_t> histogram;
  std::size_t nodes = 0;
  for (Index d : degrees) {
    if (d == 0) continue;
    ++histogram[d];
    ++nodes;
  }
  std::vector<DegreeRow> out;
  std::size_t remaining = nodes;
  for (const auto& [degree, count] : histogram) {
    out.push_back({degree, static_cast<double>(remaining) / static_cast<double>(nodes)});
    remaining -= count;
  }
  return out;
}

}  // namespace qrc
