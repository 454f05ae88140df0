#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "semrsm/analysis.hpp"
#include "semrsm/assignment.hpp"
#include "semrsm/bench.hpp"
#include "semrsm/cka.hpp"
#include "semrsm/error.hpp"
#include "semrsm/retrieval.hpp"
#include "semrsm/rsm.hpp"
#include "semrsm/tensor_io.hpp"

namespace py = pybind11;
using namespace semrsm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
  return Matrix(a.shape(0), a.shape(1), std::vector<double>(a.data(), a.data() + a.size()));
}

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

/// (N, C, S), (N, C, W, H) or (N, D) array to a batch.
RepresentationBatch to_batch(const Array& a) {
  npy::Array arr;
  for (py::ssize_t d = 0; d < a.ndim(); ++d) arr.shape.push_back(static_cast<std::size_t>(a.shape(d)));
  arr.values = to_vector(a);
  return batch_from_array(arr);
}

Array batch_array(const RepresentationBatch& z) {
  Array out({z.n_samples(), z.n_channels(), z.n_spatial()});
  std::copy(z.data().begin(), z.data().end(), out.mutable_data());
  return out;
}

KernelSpec kernel_spec(const std::string& kernel, std::optional<double> sigma) {
  KernelSpec spec = parse_kernel(kernel);
  if (sigma) spec.fixed_sigma = sigma;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semantic representational similarity: matching, RSMs, CKA, retrieval and analysis";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("load_representations", [](const std::filesystem::path& path) {
    const auto z = load_representations(path);
    return py::make_tuple(batch_array(z), z.sample_ids(), z.group_ids());
  }, py::arg("path"), "Load an NPY tensor (and its sidecar JSON) as an (N, C, S) array plus ids.");

  m.def("center", [](const Array& z, std::optional<Array> mean) {
    const auto batch = to_batch(z);
    std::optional<std::vector<double>> external;
    if (mean) external = to_vector(*mean);
    const auto c = external ? semrsm::center(batch, std::span<const double>(*external)) : semrsm::center(batch);
    return py::make_tuple(batch_array(c.batch), to_array(c.mean));
  }, py::arg("z"), py::arg("mean") = std::nullopt);

  m.def("rsm", [](const Array& z, const std::string& kernel, const std::string& matcher,
                  std::optional<double> sigma, std::size_t threads) {
    const auto batch = to_batch(z);
    const auto spec = parse_matcher(matcher);
    const auto k = kernel_spec(kernel, sigma);
    WorkerPool pool(threads);
    RsmOptions opts;
    opts.pool = &pool;
    py::gil_scoped_release release;
    const auto result = compute_rsm(batch, k, spec, opts);
    py::gil_scoped_acquire acquire;
    return to_array(result.values);
  }, py::arg("z"), py::arg("kernel") = "linear", py::arg("matcher") = "batch-optimal:512",
     py::arg("sigma") = std::nullopt, py::arg("threads") = 1);

  m.def("cross_similarity", [](const Array& queries, const Array& database, const std::string& kernel,
                               const std::string& matcher, std::size_t block, std::optional<double> sigma,
                               bool global_sigma, std::size_t threads) {
    const auto q = to_batch(queries);
    const auto d = to_batch(database);
    const auto spec = parse_matcher(matcher);
    const auto k = kernel_spec(kernel, sigma);
    WorkerPool pool(threads);
    RsmOptions opts;
    opts.pool = &pool;
    opts.global_sigma = global_sigma;
    py::gil_scoped_release release;
    const auto result = semrsm::cross_similarity(q, d, k, spec, block, opts);
    py::gil_scoped_acquire acquire;
    return to_array(result.values);
  }, py::arg("queries"), py::arg("database"), py::arg("kernel") = "cosine", py::arg("matcher") = "none",
     py::arg("block") = 100, py::arg("sigma") = std::nullopt, py::arg("global_sigma") = false,
     py::arg("threads") = 1);

  m.def("affinity", [](const Array& zi, const Array& zj) {
    if (zi.ndim() != 2 || zj.ndim() != 2) throw ShapeError("expected C x S arrays");
    const auto a = semrsm::affinity(to_vector(zi), to_vector(zj), zi.shape(0), zi.shape(1));
    return py::make_tuple(to_array(a.values), to_array(a.row_norms), to_array(a.col_norms));
  }, py::arg("zi"), py::arg("zj"), "Affinity matrix between the S concept vectors of two C x S slices.");

  m.def("match", [](const Array& zi, const Array& zj, const std::string& matcher) {
    if (zi.ndim() != 2 || zj.ndim() != 2) throw ShapeError("expected C x S arrays");
    const auto a = semrsm::affinity(to_vector(zi), to_vector(zj), zi.shape(0), zi.shape(1));
    const auto r = solve(a, parse_matcher(matcher));
    return py::make_tuple(r.permutation, r.total_affinity);
  }, py::arg("zi"), py::arg("zj"), py::arg("matcher") = "optimal",
     "Permutation p (column p[a] matched to row a) and its total affinity.");

  m.def("hsic", [](const Array& k, const Array& l) { return semrsm::hsic(to_matrix(k), to_matrix(l)); });
  m.def("cka", [](const Array& k, const Array& l) { return semrsm::cka(to_matrix(k), to_matrix(l)); });
  m.def("cka_layer_matrix", [](const std::vector<Array>& a, const std::vector<Array>& b) {
    std::vector<Matrix> ma, mb;
    for (const auto& x : a) ma.push_back(to_matrix(x));
    for (const auto& x : b) mb.push_back(to_matrix(x));
    return to_array(semrsm::cka_layer_matrix(std::span<const Matrix>(ma), std::span<const Matrix>(mb)));
  }, py::arg("a"), py::arg("b"));

  m.def("f1_instance_overlap", &f1_instance_overlap, py::arg("query"), py::arg("database"));
  m.def("iou_class_presence", &iou_class_presence, py::arg("query"), py::arg("database"));

  m.def("jsd", [](const Array& p, const Array& q, bool log2) {
    return semrsm::jsd(ProbabilityVector(to_vector(p)), ProbabilityVector(to_vector(q)),
                       log2 ? LogBase::two : LogBase::natural);
  }, py::arg("p"), py::arg("q"), py::arg("log2") = false);
  m.def("pearson", [](const Array& x, const Array& y) { return semrsm::pearson(to_vector(x), to_vector(y)); });
  m.def("spearman", [](const Array& x, const Array& y) { return semrsm::spearman(to_vector(x), to_vector(y)); });
  m.def("correlate_similarity_jsd", [](const Array& sim, const Array& probs, const std::string& method,
                                       bool from_logits) {
    const auto rows = probability_rows(to_matrix(probs), from_logits);
    const auto r = semrsm::correlate_similarity_jsd(to_matrix(sim), rows, parse_correlation_method(method));
    return py::make_tuple(r.rho, r.pairs);
  }, py::arg("sim"), py::arg("probs"), py::arg("method") = "pearson", py::arg("from_logits") = false);

  m.def("_bench_json", [](const std::vector<std::size_t>& sizes, std::size_t channels, std::size_t pairs,
                          const std::vector<std::string>& matchers, std::uint64_t seed, std::size_t warmup,
                          bool timing) {
    BenchConfig cfg;
    cfg.sizes = sizes;
    cfg.channels = channels;
    cfg.pairs = pairs;
    cfg.seed = seed;
    cfg.warmup = warmup;
    for (const auto& s : matchers) cfg.matchers.push_back(parse_matcher(s));
    py::gil_scoped_release release;
    const auto report = bench_matchers(cfg);
    return to_json(report, timing).dump();
  });

  m.def("load_matrix", [](const std::filesystem::path& path) { return to_array(semrsm::load_matrix(path).values); },
        py::arg("path"));
}
