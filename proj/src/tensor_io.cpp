#include "semrsm/tensor_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "semrsm/error.hpp"

namespace semrsm {

using nlohmann::json;

namespace {

std::vector<std::string> index_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

json kernel_json(const SimilarityMatrix& m) {
  json k = {{"kind", to_string(m.kernel.kind)}};
  if (m.kernel.kind == KernelKind::rbf) {
    if (m.kernel.fixed_sigma) {
      k["sigma_policy"] = "fixed";
      k["sigma"] = *m.kernel.fixed_sigma;
    } else {
      k["sigma_policy"] = "median-heuristic";
      if (m.sigma) k["sigma"] = *m.sigma;
    }
  }
  return k;
}

json matcher_json(const MatcherSpec& spec) {
  json j = {{"kind", to_string(spec.kind)}};
  if (spec.kind == MatcherKind::topk_greedy) j["k"] = spec.k;
  if (spec.kind == MatcherKind::batch_optimal) j["b"] = spec.b;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

RepresentationBatch::RepresentationBatch(std::size_t n_samples, std::size_t n_channels,
                                         std::size_t n_spatial, std::vector<double> data,
                                         std::vector<std::string> sample_ids,
                                         std::vector<std::string> group_ids)
    : n_samples_(n_samples),
      n_channels_(n_channels),
      n_spatial_(n_spatial),
      data_(std::move(data)),
      sample_ids_(std::move(sample_ids)),
      group_ids_(std::move(group_ids)) {
  if (n_samples_ < 1 || n_channels_ < 1 || n_spatial_ < 1) {
    throw ShapeError("representation batch needs N, C, S >= 1");
  }
  if (data_.size() != n_samples_ * n_channels_ * n_spatial_) {
    throw ShapeError("representation data size does not match N x C x S");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      const auto per = sample_size();
      throw ValidationError("non-finite activation in sample " + std::to_string(i / per) +
                            " at flat offset " + std::to_string(i % per));
    }
  }
  if (sample_ids_.empty()) {
    sample_ids_ = index_ids(n_samples_);
  } else if (sample_ids_.size() != n_samples_) {
    throw ValidationError("sample_ids has " + std::to_string(sample_ids_.size()) +
                          " entries for " + std::to_string(n_samples_) + " samples");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : sample_ids_) {
    if (!seen.insert(id).second) throw ValidationError("duplicate sample id '" + id + "'");
  }
  if (!group_ids_.empty() && group_ids_.size() != n_samples_) {
    throw ValidationError("group_ids has " + std::to_string(group_ids_.size()) +
                          " entries for " + std::to_string(n_samples_) + " samples");
  }
}

RepresentationBatch RepresentationBatch::slice(std::size_t first, std::size_t count) const {
  if (first + count > n_samples_ || count == 0) throw ShapeError("batch slice out of range");
  const auto per = sample_size();
  std::vector<double> data(data_.begin() + static_cast<std::ptrdiff_t>(first * per),
                           data_.begin() + static_cast<std::ptrdiff_t>((first + count) * per));
  std::vector<std::string> ids(sample_ids_.begin() + static_cast<std::ptrdiff_t>(first),
                               sample_ids_.begin() + static_cast<std::ptrdiff_t>(first + count));
  std::vector<std::string> groups;
  if (has_groups()) {
    groups.assign(group_ids_.begin() + static_cast<std::ptrdiff_t>(first),
                  group_ids_.begin() + static_cast<std::ptrdiff_t>(first + count));
  }
  return {count, n_channels_, n_spatial_, std::move(data), std::move(ids), std::move(groups)};
}

RepresentationBatch batch_from_array(const npy::Array& array) {
  const auto& shape = array.shape;
  std::size_t n = 0, c = 0, s = 0;
  switch (shape.size()) {
    case 2: n = shape[0]; c = shape[1]; s = 1; break;
    case 3: n = shape[0]; c = shape[1]; s = shape[2]; break;
    case 4: n = shape[0]; c = shape[1]; s = shape[2] * shape[3]; break;
    default:
      throw ShapeError("representations must have rank 2, 3 or 4, got rank " +
                       std::to_string(shape.size()));
  }
  return {n, c, s, array.values};
}

RepresentationBatch load_representations(const std::filesystem::path& path) {
  auto array = npy::read(path);
  auto batch = batch_from_array(array);

  auto sidecar = path;
  sidecar.replace_extension(".json");
  if (!std::filesystem::exists(sidecar)) return batch;

  std::ifstream in(sidecar);
  if (!in) throw IoError("cannot open '" + sidecar.string() + "'");
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("sidecar '" + sidecar.string() + "' is not valid JSON: " + e.what());
  }
  std::vector<std::string> sample_ids;
  std::vector<std::string> group_ids;
  try {
    if (meta.contains("sample_ids")) sample_ids = meta.at("sample_ids").get<std::vector<std::string>>();
    if (meta.contains("group_ids")) group_ids = meta.at("group_ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError("sidecar '" + sidecar.string() + "' ids must be string lists: " + e.what());
  }
  return {batch.n_samples(), batch.n_channels(), batch.n_spatial(), std::move(array.values),
          std::move(sample_ids), std::move(group_ids)};
}

Centered center(const RepresentationBatch& batch,
                std::optional<std::span<const double>> external_mean) {
  const auto per = batch.sample_size();
  std::vector<double> mean(per, 0.0);
  if (external_mean) {
    if (external_mean->size() != per) {
      throw ShapeError("external mean has " + std::to_string(external_mean->size()) +
                       " entries, expected C x S = " + std::to_string(per));
    }
    mean.assign(external_mean->begin(), external_mean->end());
  } else {
    for (std::size_t n = 0; n < batch.n_samples(); ++n) {
      const auto z = batch.sample(n);
      for (std::size_t k = 0; k < per; ++k) mean[k] += z[k];
    }
    const double inv = 1.0 / static_cast<double>(batch.n_samples());
    for (auto& m : mean) m *= inv;
  }
  std::vector<double> data(batch.data().begin(), batch.data().end());
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    for (std::size_t k = 0; k < per; ++k) data[n * per + k] -= mean[k];
  }
  return {RepresentationBatch(batch.n_samples(), batch.n_channels(), batch.n_spatial(),
                              std::move(data), batch.sample_ids(), batch.group_ids()),
          std::move(mean)};
}

MatrixFormat parse_matrix_format(std::string_view text) {
  if (text == "npy") return MatrixFormat::npy;
  if (text == "csv") return MatrixFormat::csv;
  if (text == "json") return MatrixFormat::json;
  throw InvalidArgument("unknown matrix format '" + std::string(text) + "'");
}

MatrixFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return MatrixFormat::csv;
  if (ext == ".json") return MatrixFormat::json;
  return MatrixFormat::npy;
}

void save_matrix(const SimilarityMatrix& matrix, const std::filesystem::path& path,
                 MatrixFormat format, npy::Dtype dtype) {
  const auto rows = matrix.rows();
  const auto cols = matrix.cols();
  switch (format) {
    case MatrixFormat::npy: {
      const std::size_t shape[] = {rows, cols};
      npy::write(path, shape, matrix.values.data(), dtype);
      return;
    }
    case MatrixFormat::csv: {
      const auto col_ids = matrix.col_ids.empty() ? index_ids(cols) : matrix.col_ids;
      std::string text;
      for (std::size_t c = 0; c < cols; ++c) {
        if (c > 0) text += ',';
        text += csv_escape(col_ids[c]);
      }
      text += '\n';
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          if (c > 0) text += ',';
          text += format_double(matrix.values(r, c));
        }
        text += '\n';
      }
      write_text(path, text);
      return;
    }
    case MatrixFormat::json: {
      json values = json::array();
      for (std::size_t r = 0; r < rows; ++r) {
        const auto row = matrix.values.row(r);
        values.push_back(std::vector<double>(row.begin(), row.end()));
      }
      json doc = {
          {"kind", to_string(matrix.kind)},
          {"shape", {rows, cols}},
          {"kernel", kernel_json(matrix)},
          {"matcher", matcher_json(matrix.matcher)},
          {"row_ids", matrix.row_ids},
          {"col_ids", matrix.col_ids},
          {"values", std::move(values)},
      };
      write_text(path, doc.dump() + "\n");
      return;
    }
  }
}

SimilarityMatrix load_matrix(const std::filesystem::path& path) {
  SimilarityMatrix m;
  if (format_from_extension(path) == MatrixFormat::json) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
      const auto doc = json::parse(in);
      const auto& values = doc.at("values");
      const std::size_t rows = values.size();
      const std::size_t cols = rows == 0 ? 0 : values.at(0).size();
      std::vector<double> flat;
      flat.reserve(rows * cols);
      for (const auto& row : values) {
        if (row.size() != cols) throw FormatError("ragged matrix rows in '" + path.string() + "'");
        for (const auto& v : row) flat.push_back(v.get<double>());
      }
      m.values = Matrix(rows, cols, std::move(flat));
      m.kind = parse_matrix_kind(doc.value("kind", std::string("rectangular")));
      m.row_ids = doc.value("row_ids", std::vector<std::string>{});
      m.col_ids = doc.value("col_ids", std::vector<std::string>{});
      if (doc.contains("kernel")) {
        const auto& k = doc.at("kernel");
        m.kernel.kind = parse_kernel_kind(k.at("kind").get<std::string>());
        if (k.value("sigma_policy", std::string()) == "fixed") {
          m.kernel.fixed_sigma = k.at("sigma").get<double>();
        } else if (k.contains("sigma")) {
          m.sigma = k.at("sigma").get<double>();
        }
      }
      if (doc.contains("matcher")) {
        const auto& mt = doc.at("matcher");
        m.matcher.kind = parse_matcher_kind(mt.at("kind").get<std::string>());
        m.matcher.k = mt.value("k", std::size_t{0});
        m.matcher.b = mt.value("b", std::size_t{0});
      }
    } catch (const json::exception& e) {
      throw FormatError("'" + path.string() + "' is not a valid matrix document: " + e.what());
    }
    return m;
  }
  auto array = npy::read(path);
  if (array.shape.size() != 2) {
    throw ShapeError("matrix file '" + path.string() + "' must have rank 2");
  }
  m.values = Matrix(array.shape[0], array.shape[1], std::move(array.values));
  m.kind = m.values.is_square() ? MatrixKind::square_symmetric : MatrixKind::rectangular;
  return m;
}

}  // namespace semrsm
