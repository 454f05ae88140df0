#include "semrsm/types.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "semrsm/error.hpp"

namespace semrsm {

namespace {

constexpr double kRangeSlack = 1e-9;

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void KernelSpec::validate() const {
  if (fixed_sigma && kind != KernelKind::rbf) {
    throw InvalidArgument("a fixed sigma only applies to the rbf kernel");
  }
  if (fixed_sigma && !(*fixed_sigma > 0.0 && std::isfinite(*fixed_sigma))) {
    throw InvalidArgument("rbf sigma must be a positive finite number");
  }
}

void MatcherSpec::validate(std::optional<std::size_t> spatial) const {
  switch (kind) {
    case MatcherKind::topk_greedy:
      if (k < 1) throw InvalidArgument("topk-greedy requires k >= 1");
      if (spatial && k > *spatial) {
        throw InvalidArgument("topk-greedy k=" + std::to_string(k) +
                              " exceeds spatial size " + std::to_string(*spatial));
      }
      break;
    case MatcherKind::batch_optimal:
      if (b < 1) throw InvalidArgument("batch-optimal requires b >= 1");
      break;
    default:
      break;
  }
}

void SimilarityMatrix::validate() const {
  const auto n_rows = values.rows();
  const auto n_cols = values.cols();
  if (!row_ids.empty() && row_ids.size() != n_rows) {
    throw ValidationError("row_ids length does not match the matrix rows");
  }
  if (!col_ids.empty() && col_ids.size() != n_cols) {
    throw ValidationError("col_ids length does not match the matrix columns");
  }
  if (kind == MatrixKind::square_symmetric && n_rows != n_cols) {
    throw ValidationError("square-symmetric matrix is not square");
  }
  double lo = -INFINITY;
  double hi = INFINITY;
  if (kernel.kind == KernelKind::rbf) {
    lo = 0.0 - kRangeSlack;
    hi = 1.0 + kRangeSlack;
  } else if (kernel.kind == KernelKind::cosine) {
    lo = -1.0 - kRangeSlack;
    hi = 1.0 + kRangeSlack;
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      const double v = values(r, c);
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite similarity at (" + std::to_string(r) + ", " +
                              std::to_string(c) + ")");
      }
      if (v < lo || v > hi) {
        throw ValidationError("similarity " + std::to_string(v) + " outside the " +
                              to_string(kernel.kind) + " kernel range");
      }
      if (kind == MatrixKind::square_symmetric && c > r && v != values(c, r)) {
        throw ValidationError("matrix is not exactly symmetric at (" + std::to_string(r) + ", " +
                              std::to_string(c) + ")");
      }
    }
  }
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::cosine: return "cosine";
  }
  return "unknown";
}

std::string to_string(MatcherKind kind) {
  switch (kind) {
    case MatcherKind::none: return "none";
    case MatcherKind::optimal: return "optimal";
    case MatcherKind::greedy: return "greedy";
    case MatcherKind::topk_greedy: return "topk-greedy";
    case MatcherKind::batch_optimal: return "batch-optimal";
  }
  return "unknown";
}

std::string to_string(MatrixKind kind) {
  return kind == MatrixKind::square_symmetric ? "square-symmetric" : "rectangular";
}

std::string to_string(const MatcherSpec& spec) {
  switch (spec.kind) {
    case MatcherKind::topk_greedy: return "topk-greedy:" + std::to_string(spec.k);
    case MatcherKind::batch_optimal: return "batch-optimal:" + std::to_string(spec.b);
    default: return to_string(spec.kind);
  }
}

std::string to_string(const KernelSpec& spec) {
  if (spec.fixed_sigma) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *spec.fixed_sigma);
    (void)ec;
    return "rbf:" + std::string(buf, ptr);
  }
  return to_string(spec.kind);
}

KernelKind parse_kernel_kind(std::string_view text) {
  if (text == "linear") return KernelKind::linear;
  if (text == "rbf") return KernelKind::rbf;
  if (text == "cosine") return KernelKind::cosine;
  throw InvalidArgument("unknown kernel '" + std::string(text) + "'");
}

MatcherKind parse_matcher_kind(std::string_view text) {
  if (text == "none") return MatcherKind::none;
  if (text == "optimal") return MatcherKind::optimal;
  if (text == "greedy") return MatcherKind::greedy;
  if (text == "topk-greedy") return MatcherKind::topk_greedy;
  if (text == "batch-optimal") return MatcherKind::batch_optimal;
  throw InvalidArgument("unknown matcher '" + std::string(text) + "'");
}

MatrixKind parse_matrix_kind(std::string_view text) {
  if (text == "square-symmetric") return MatrixKind::square_symmetric;
  if (text == "rectangular") return MatrixKind::rectangular;
  throw InvalidArgument("unknown matrix kind '" + std::string(text) + "'");
}

MatcherSpec parse_matcher(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  MatcherSpec spec{parse_matcher_kind(name), 0, 0};
  const bool has_param = colon != std::string_view::npos;
  switch (spec.kind) {
    case MatcherKind::topk_greedy:
      if (!has_param) throw InvalidArgument("topk-greedy needs a k, e.g. topk-greedy:32");
      spec.k = parse_count(text.substr(colon + 1), "topk k");
      break;
    case MatcherKind::batch_optimal:
      spec.b = has_param ? parse_count(text.substr(colon + 1), "batch size") : kDefaultBatchSize;
      break;
    default:
      if (has_param) {
        throw InvalidArgument("matcher '" + std::string(name) + "' takes no parameter");
      }
  }
  spec.validate();
  return spec;
}

KernelSpec parse_kernel(std::string_view text) {
  const auto colon = text.find(':');
  KernelSpec spec{parse_kernel_kind(text.substr(0, colon)), std::nullopt};
  if (colon != std::string_view::npos) {
    const auto param = text.substr(colon + 1);
    double sigma = 0.0;
    auto [ptr, ec] = std::from_chars(param.data(), param.data() + param.size(), sigma);
    if (ec != std::errc{} || ptr != param.data() + param.size()) {
      throw InvalidArgument("invalid sigma '" + std::string(param) + "'");
    }
    spec.fixed_sigma = sigma;
  }
  spec.validate();
  return spec;
}

}  // namespace semrsm
