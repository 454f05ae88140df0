#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "semrsm/types.hpp"

namespace semrsm {

/// Number of annotated instances per class; a missing class counts as 0.
using InstanceCounts = std::map<std::string, std::size_t>;
using ClassSet = std::set<std::string>;

struct RetrievalResult {
  std::string query_id;
  std::vector<std::size_t> ranked_indices;
  std::vector<std::string> ranked_ids;
  std::vector<double> scores;
  /// Fewer than k eligible columns were available.
  bool short_list = false;
};

/// The k highest-scoring columns of row `query_index`, skipping columns
/// whose group equals `exclude_group`. Ties go to the lower column index.
/// `column_groups` may be empty when no exclusion is requested.
RetrievalResult retrieve_topk(const SimilarityMatrix& sim, std::size_t query_index, std::size_t k,
                              const std::optional<std::string>& exclude_group = std::nullopt,
                              std::span<const std::string> column_groups = {});

/// 2 TP / (2 TP + FP + FN) with TP = sum min(Q_c, D_c). Two empty inputs score 1.
double f1_instance_overlap(const InstanceCounts& query, const InstanceCounts& database);

/// |q & d| / |q | d|; two empty sets score 1.
double iou_class_presence(const ClassSet& query, const ClassSet& database);

/// Classes with a positive count.
ClassSet present_classes(const InstanceCounts& counts);

enum class RetrievalMetric { f1, iou };
RetrievalMetric parse_retrieval_metric(std::string_view text);
std::string to_string(RetrievalMetric metric);

struct QueryEvaluation {
  RetrievalResult retrieval;
  /// Metric between the query and its rank-1 neighbour; absent when no
  /// eligible neighbour exists.
  std::optional<double> metric;
};

struct RetrievalReport {
  RetrievalMetric metric = RetrievalMetric::f1;
  std::size_t k = 1;
  std::vector<QueryEvaluation> queries;
  /// Mean rank-1 metric over queries that had a neighbour.
  double mean_at_1 = 0.0;
  std::size_t evaluated = 0;
};

struct GroupExclusion {
  std::span<const std::string> query_groups;
  std::span<const std::string> database_groups;
};

/// Ranks every row of `sim` and scores its rank-1 neighbour against the
/// labels. Labels are looked up by row_ids / col_ids; a missing id throws
/// ValidationError naming it.
RetrievalReport evaluate_retrieval(const SimilarityMatrix& sim,
                                   const std::map<std::string, InstanceCounts>& labels,
                                   std::size_t k, RetrievalMetric metric,
                                   const std::optional<GroupExclusion>& exclusion = std::nullopt);

/// Labels JSON: {"id": {"class": count, ...}, ...}.
std::map<std::string, InstanceCounts> load_labels(const std::filesystem::path& path);
std::map<std::string, InstanceCounts> parse_labels(const nlohmann::json& doc);

nlohmann::json to_json(const RetrievalReport& report);

}  // namespace semrsm
