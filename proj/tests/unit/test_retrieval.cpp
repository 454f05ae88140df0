#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "semrsm/error.hpp"
#include "semrsm/retrieval.hpp"

using namespace semrsm;

namespace {

SimilarityMatrix rect(std::size_t r, std::size_t c, std::vector<double> values,
                      std::vector<std::string> rows, std::vector<std::string> cols) {
  SimilarityMatrix m;
  m.values = Matrix(r, c, std::move(values));
  m.row_ids = std::move(rows);
  m.col_ids = std::move(cols);
  m.kind = MatrixKind::rectangular;
  return m;
}

}  // namespace

TEST_CASE("top-k ranking") {
  auto m = rect(1, 3, {0.1, 0.9, 0.5}, {"q"}, {"a", "b", "c"});
  auto r = retrieve_topk(m, 0, 1);
  CHECK(r.ranked_ids == std::vector<std::string>{"b"});
  CHECK(r.scores == std::vector<double>{0.9});
  CHECK_FALSE(r.short_list);

  m = rect(1, 2, {0.9, 0.8}, {"q"}, {"a", "b"});
  const std::vector<std::string> groups{"g0", "g1"};
  r = retrieve_topk(m, 0, 1, std::string("g0"), groups);
  CHECK(r.ranked_indices == std::vector<std::size_t>{1});

  m = rect(1, 3, {0.5, 0.5, 0.2}, {"q"}, {"a", "b", "c"});
  r = retrieve_topk(m, 0, 2);
  CHECK(r.ranked_indices == std::vector<std::size_t>{0, 1});

  r = retrieve_topk(m, 0, 5);
  CHECK(r.ranked_indices.size() == 3);
  CHECK(r.short_list);
}

TEST_CASE("F1 instance overlap") {
  CHECK(f1_instance_overlap({{"a", 2}, {"b", 1}}, {{"a", 1}, {"c", 1}}) == doctest::Approx(0.4));
  CHECK(f1_instance_overlap({{"a", 2}, {"b", 1}}, {{"a", 2}, {"b", 1}}) == 1.0);
  CHECK(f1_instance_overlap({{"a", 2}}, {{"b", 3}}) == 0.0);
  CHECK(f1_instance_overlap({}, {}) == 1.0);
  CHECK(f1_instance_overlap({{"a", 1}}, {}) == 0.0);
}

TEST_CASE("IoU class presence") {
  CHECK(iou_class_presence({"road", "car"}, {"car", "sky"}) == doctest::Approx(1.0 / 3.0));
  CHECK(iou_class_presence({"road", "car"}, {"car", "road"}) == 1.0);
  CHECK(iou_class_presence({"road"}, {"sky"}) == 0.0);
  CHECK(iou_class_presence({}, {}) == 1.0);
  CHECK(present_classes({{"a", 0}, {"b", 2}}) == ClassSet{"b"});
}

TEST_CASE("evaluate retrieval") {
  std::map<std::string, InstanceCounts> labels{
      {"q0", {{"a", 2}, {"b", 1}}}, {"q1", {{"c", 1}}}, {"q2", {{"a", 1}}},
      {"d0", {{"a", 1}, {"c", 1}}}, {"d1", {{"c", 1}}}, {"d2", {{"b", 4}}}};

  SUBCASE("hand-built three query example") {
    // q0 -> d0 (F1 0.4), q1 -> d1 (1.0), q2 -> d2 (0.0)
    const auto sim = rect(3, 3, {0.9, 0.1, 0.2, 0.3, 0.8, 0.3, 0.1, 0.1, 0.7},
                          {"q0", "q1", "q2"}, {"d0", "d1", "d2"});
    const auto report = evaluate_retrieval(sim, labels, 1, RetrievalMetric::f1);
    CHECK(report.evaluated == 3);
    CHECK(report.mean_at_1 == doctest::Approx((0.4 + 1.0 + 0.0) / 3.0));
    const auto iou = evaluate_retrieval(sim, labels, 1, RetrievalMetric::iou);
    // {a,b} vs {a,c} = 1/3, {c} vs {c} = 1, {a} vs {b} = 0
    CHECK(iou.mean_at_1 == doctest::Approx((1.0 / 3.0 + 1.0) / 3.0));
    const auto j = to_json(report);
    CHECK(j.contains("mean_f1_at_1"));
  }
  SUBCASE("duplicates everywhere") {
    std::map<std::string, InstanceCounts> same{{"x", {{"a", 1}}}, {"y", {{"b", 2}}}};
    const auto sim = rect(2, 2, {1.0, 0.2, 0.3, 1.0}, {"x", "y"}, {"x", "y"});
    CHECK(evaluate_retrieval(sim, same, 1, RetrievalMetric::f1).mean_at_1 == 1.0);
  }
  SUBCASE("missing label names the id") {
    const auto sim = rect(1, 1, {1.0}, {"q0"}, {"nope"});
    try {
      evaluate_retrieval(sim, labels, 1, RetrievalMetric::f1);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
  }
  SUBCASE("group exclusion skips same-group neighbours") {
    const auto sim = rect(1, 2, {0.9, 0.1}, {"q1"}, {"d0", "d1"});
    const std::vector<std::string> qg{"g"}, dg{"g", "h"};
    const auto report =
        evaluate_retrieval(sim, labels, 1, RetrievalMetric::f1, GroupExclusion{qg, dg});
    CHECK(report.queries[0].retrieval.ranked_ids.front() == "d1");
    CHECK(report.mean_at_1 == 1.0);
  }
}

TEST_CASE("labels file") {
  const auto path = std::filesystem::temp_directory_path() / "semrsm_labels.json";
  {
    std::ofstream out(path);
    out << R"({"img1": {"car": 2, "road": 1}, "img2": {}})";
  }
  const auto labels = load_labels(path);
  CHECK(labels.at("img1").at("car") == 2);
  CHECK(labels.at("img2").empty());
  {
    std::ofstream out(path);
    out << R"({"img1": {"car": -1}})";
  }
  CHECK_THROWS(load_labels(path));
  CHECK(parse_retrieval_metric("iou") == RetrievalMetric::iou);
  CHECK_THROWS_AS(parse_retrieval_metric("map"), InvalidArgument);
}
