#include "semrsm/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "semrsm/error.hpp"

namespace semrsm {

using nlohmann::json;

RetrievalResult retrieve_topk(const SimilarityMatrix& sim, std::size_t query_index, std::size_t k,
                              const std::optional<std::string>& exclude_group,
                              std::span<const std::string> column_groups) {
  if (k < 1) throw InvalidArgument("retrieval k must be >= 1");
  if (query_index >= sim.rows()) throw InvalidArgument("query index out of range");
  if (exclude_group && column_groups.size() != sim.cols()) {
    throw ShapeError("group exclusion needs one group id per database column");
  }
  const auto row = sim.values.row(query_index);
  std::vector<std::size_t> eligible;
  eligible.reserve(sim.cols());
  for (std::size_t c = 0; c < sim.cols(); ++c) {
    if (exclude_group && column_groups[c] == *exclude_group) continue;
    eligible.push_back(c);
  }
  const std::size_t take = std::min(k, eligible.size());
  auto better = [&](std::size_t l, std::size_t r) {
    return row[l] > row[r] || (row[l] == row[r] && l < r);
  };
  std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(take),
                    eligible.end(), better);

  RetrievalResult out;
  out.query_id = sim.row_ids.empty() ? std::to_string(query_index) : sim.row_ids[query_index];
  out.short_list = take < k;
  for (std::size_t t = 0; t < take; ++t) {
    const auto c = eligible[t];
    out.ranked_indices.push_back(c);
    out.ranked_ids.push_back(sim.col_ids.empty() ? std::to_string(c) : sim.col_ids[c]);
    out.scores.push_back(row[c]);
  }
  return out;
}

double f1_instance_overlap(const InstanceCounts& query, const InstanceCounts& database) {
  std::size_t tp = 0, fn = 0, fp = 0;
  for (const auto& [cls, q] : query) {
    const auto it = database.find(cls);
    const std::size_t d = it == database.end() ? 0 : it->second;
    tp += std::min(q, d);
    fn += q > d ? q - d : 0;
  }
  for (const auto& [cls, d] : database) {
    const auto it = query.find(cls);
    const std::size_t q = it == query.end() ? 0 : it->second;
    fp += d > q ? d - q : 0;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * tp) / static_cast<double>(denom);
}

double iou_class_presence(const ClassSet& query, const ClassSet& database) {
  if (query.empty() && database.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& c : query) inter += database.count(c);
  const std::size_t uni = query.size() + database.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

ClassSet present_classes(const InstanceCounts& counts) {
  ClassSet out;
  for (const auto& [cls, n] : counts) {
    if (n > 0) out.insert(cls);
  }
  return out;
}

RetrievalMetric parse_retrieval_metric(std::string_view text) {
  if (text == "f1") return RetrievalMetric::f1;
  if (text == "iou") return RetrievalMetric::iou;
  throw InvalidArgument("unknown retrieval metric '" + std::string(text) + "'");
}

std::string to_string(RetrievalMetric metric) {
  return metric == RetrievalMetric::f1 ? "f1" : "iou";
}

RetrievalReport evaluate_retrieval(const SimilarityMatrix& sim,
                                   const std::map<std::string, InstanceCounts>& labels,
                                   std::size_t k, RetrievalMetric metric,
                                   const std::optional<GroupExclusion>& exclusion) {
  if (exclusion && exclusion->query_groups.size() != sim.rows()) {
    throw ShapeError("group exclusion needs one group id per query");
  }
  auto label_of = [&](const std::string& id) -> const InstanceCounts& {
    const auto it = labels.find(id);
    if (it == labels.end()) throw ValidationError("no labels for id '" + id + "'");
    return it->second;
  };
  auto id_at = [](const std::vector<std::string>& ids, std::size_t i) {
    return ids.empty() ? std::to_string(i) : ids[i];
  };
  for (std::size_t r = 0; r < sim.rows(); ++r) label_of(id_at(sim.row_ids, r));
  for (std::size_t c = 0; c < sim.cols(); ++c) label_of(id_at(sim.col_ids, c));

  RetrievalReport report;
  report.metric = metric;
  report.k = k;
  report.queries.resize(sim.rows());
  double sum = 0.0;
  for (std::size_t r = 0; r < sim.rows(); ++r) {
    std::optional<std::string> group;
    std::span<const std::string> col_groups;
    if (exclusion) {
      group = exclusion->query_groups[r];
      col_groups = exclusion->database_groups;
    }
    auto& entry = report.queries[r];
    entry.retrieval = retrieve_topk(sim, r, k, group, col_groups);
    if (entry.retrieval.ranked_ids.empty()) continue;
    const auto& q = label_of(entry.retrieval.query_id);
    const auto& d = label_of(entry.retrieval.ranked_ids.front());
    entry.metric = metric == RetrievalMetric::f1
                       ? f1_instance_overlap(q, d)
                       : iou_class_presence(present_classes(q), present_classes(d));
    sum += *entry.metric;
    ++report.evaluated;
  }
  report.mean_at_1 = report.evaluated == 0 ? 0.0 : sum / static_cast<double>(report.evaluated);
  return report;
}

std::map<std::string, InstanceCounts> parse_labels(const json& doc) {
  if (!doc.is_object()) throw FormatError("labels must be a JSON object keyed by id");
  std::map<std::string, InstanceCounts> out;
  for (const auto& [id, classes] : doc.items()) {
    if (!classes.is_object()) {
      throw FormatError("labels for '" + id + "' must map class names to counts");
    }
    InstanceCounts counts;
    for (const auto& [cls, n] : classes.items()) {
      if (!n.is_number_integer() || n.get<long long>() < 0) {
        throw FormatError("count for class '" + cls + "' of '" + id +
                          "' must be a non-negative integer");
      }
      counts[cls] = n.get<std::size_t>();
    }
    out.emplace(id, std::move(counts));
  }
  return out;
}

std::map<std::string, InstanceCounts> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return parse_labels(json::parse(in));
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

json to_json(const RetrievalReport& report) {
  json rows = json::array();
  for (const auto& q : report.queries) {
    json row = {
        {"query_id", q.retrieval.query_id},
        {"ranked_ids", q.retrieval.ranked_ids},
        {"scores", q.retrieval.scores},
        {"short", q.retrieval.short_list},
    };
    row["metric"] = q.metric ? json(*q.metric) : json(nullptr);
    rows.push_back(std::move(row));
  }
  const auto name = to_string(report.metric);
  return {
      {"metric", name},
      {"k", report.k},
      {"n_queries", report.queries.size()},
      {"n_evaluated", report.evaluated},
      {"mean_" + name + "_at_1", report.mean_at_1},
      {"queries", std::move(rows)},
  };
}

}  // namespace semrsm
