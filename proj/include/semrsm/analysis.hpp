#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semrsm/matrix.hpp"
#include "semrsm/parallel.hpp"

namespace semrsm {

/// Non-negative probabilities summing to one (within 1e-6).
class ProbabilityVector {
 public:
  /// Inputs summing to 1 +- 1e-4 are renormalized; anything else, negative
  /// or non-finite entries throw ValidationError.
  explicit ProbabilityVector(std::span<const double> values);

  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> values() const noexcept { return probs_; }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Rows of an N x M matrix as probability vectors, optionally through softmax.
std::vector<ProbabilityVector> probability_rows(const Matrix& rows, bool from_logits = false);

enum class LogBase { natural, two };

/// sum_i p_i log(p_i / q_i). Terms with p_i = 0 vanish; p_i > 0 with q_i = 0
/// gives +infinity. Throws ShapeError on length mismatch.
double kl_divergence(const ProbabilityVector& p, const ProbabilityVector& q,
                     LogBase base = LogBase::natural);

/// Jensen-Shannon divergence; within [0, ln 2] in nats, [0, 1] in bits.
double jsd(const ProbabilityVector& p, const ProbabilityVector& q,
           LogBase base = LogBase::natural);

/// Product-moment correlation; absent when either input has zero variance.
/// Throws InvalidArgument for mismatched lengths or fewer than two values.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

/// Ranks starting at 1 with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

enum class CorrelationMethod { pearson, spearman };
CorrelationMethod parse_correlation_method(std::string_view text);
std::string to_string(CorrelationMethod method);

/// Pairwise JSD matrix (zero diagonal, exactly symmetric).
Matrix jsd_matrix(std::span<const ProbabilityVector> probs, LogBase base = LogBase::natural,
                  WorkerPool* pool = nullptr);

struct CorrelationResult {
  std::optional<double> rho;
  std::size_t pairs = 0;
};

/// Correlates the strict upper triangle of `sim` with the matching
/// pairwise JSDs. Negative values mean similar representations go with
/// similar predictions. Throws InvalidArgument for N < 3.
CorrelationResult correlate_similarity_jsd(const Matrix& sim,
                                           std::span<const ProbabilityVector> probs,
                                           CorrelationMethod method,
                                           LogBase base = LogBase::natural,
                                           WorkerPool* pool = nullptr);

}  // namespace semrsm
