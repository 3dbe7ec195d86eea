#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrc/algorithms.hpp"
#include "qrc/simulator.hpp"

namespace qrc {

// A statistic that may be undefined. `reason` explains a missing value.
struct Estimate {
  std::optional<double> value;
  std::string reason;

  bool has_value() const { return value.has_value(); }
};

// Product-moment correlation. Missing for mismatched or short inputs and for
// zero-variance inputs.
Estimate pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  Estimate quality_fitness;     // c_Qf
  Estimate reputation_ability;  // c_Ra
  Estimate quality_age;         // c_Qt, against creation step
  Estimate reputation_activity; // c_Rnu
};

CorrelationReport correlation_report(const ScoreSet& scores, const GroundTruth& truth);

struct TopK {
  std::vector<Index> ids;
  bool truncated = false;  // fewer than k nodes were available
};

// Ids of the k largest scores, descending, ties broken by ascending id.
TopK top_k(std::span<const double> scores, std::size_t k);

struct PaperMetadata {
  std::string id;
  long submission_day = 0;
  double downloads = 0;
  double citations = 0;
  double impact_factor = 0;
};

struct MeanSe {
  double mean = 0;
  double se = 0;
};

struct TopKReport {
  std::size_t k = 0;
  MeanSe submission_day;
  MeanSe downloads;
  MeanSe citations;
  MeanSe impact_factor;
  bool singleton = false;  // k == 1, standard errors reported as 0
};

// Mean and standard error (sample sd / sqrt(n)); se = 0 for n == 1.
MeanSe mean_and_se(std::span<const double> values);

// `metadata[i]` describes ranked node i. Throws DataError when a ranked id has
// no record.
TopKReport top_k_report(std::span<const Index> ranking,
                        std::span<const std::optional<PaperMetadata>> metadata);

enum class Alternative { TwoSided, Less, Greater };
enum class PValueMethod { Auto, Exact, Normal };

struct MannWhitneyResult {
  double u = 0;        // U for sample_a: pairs a > b plus half the ties
  double p_value = 1;
  bool exact = false;
};

// Midranks for ties. Auto uses the exact null distribution unless both
// samples have at least 8 observations, in which case the tie-corrected normal
// approximation with continuity correction is used.
MannWhitneyResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                                 Alternative alternative = Alternative::TwoSided,
                                 PValueMethod method = PValueMethod::Auto);

struct DegreeRow {
  Index degree = 0;
  double fraction_at_least = 0;
};

// Descending-cumulative distribution over nodes with degree >= 1.
std::vector<DegreeRow> degree_distribution(std::span<const Index> degrees);

}  // namespace qrc
