#include "semrsm/npy.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "semrsm/error.hpp"

namespace semrsm::npy {

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read and written as little-endian");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicSize = 6;
constexpr std::size_t kAlignment = 64;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Returns the text following "'key':" in a Python dict literal.
std::string_view value_after_key(std::string_view header, std::string_view key) {
  const std::string quoted = "'" + std::string(key) + "'";
  auto pos = header.find(quoted);
  if (pos == std::string_view::npos) {
    throw FormatError("NPY header is missing the '" + std::string(key) + "' key");
  }
  pos = header.find(':', pos + quoted.size());
  if (pos == std::string_view::npos) throw FormatError("NPY header is malformed");
  return trim(header.substr(pos + 1));
}

Dtype parse_descr(std::string_view header) {
  auto rest = value_after_key(header, "descr");
  if (rest.empty() || (rest.front() != '\'' && rest.front() != '"')) {
    throw FormatError("NPY 'descr' is not a string");
  }
  const char quote = rest.front();
  const auto end = rest.find(quote, 1);
  if (end == std::string_view::npos) throw FormatError("NPY 'descr' is unterminated");
  const auto descr = rest.substr(1, end - 1);
  if (descr == "<f8") return Dtype::f8;
  if (descr == "<f4") return Dtype::f4;
  throw FormatError("unsupported NPY dtype '" + std::string(descr) +
                    "' (expected '<f4' or '<f8')");
}

bool parse_fortran_order(std::string_view header) {
  auto rest = value_after_key(header, "fortran_order");
  if (rest.starts_with("False")) return false;
  if (rest.starts_with("True")) return true;
  throw FormatError("NPY 'fortran_order' is not a boolean");
}

std::vector<std::size_t> parse_shape(std::string_view header) {
  auto rest = value_after_key(header, "shape");
  if (rest.empty() || rest.front() != '(') throw FormatError("NPY 'shape' is not a tuple");
  const auto close = rest.find(')');
  if (close == std::string_view::npos) throw FormatError("NPY 'shape' is unterminated");
  auto body = rest.substr(1, close - 1);
  std::vector<std::size_t> shape;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = trim(body.substr(0, comma));
    if (!item.empty()) {
      std::size_t dim = 0;
      for (char ch : item) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
          throw FormatError("NPY 'shape' has a non-integer entry '" + std::string(item) + "'");
        }
        dim = dim * 10 + static_cast<std::size_t>(ch - '0');
      }
      shape.push_back(dim);
    }
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return shape;
}

std::size_t element_count(std::span<const std::size_t> shape) {
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  return count;
}

std::string shape_literal(std::span<const std::size_t> shape) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ", ";
    out << shape[i];
  }
  if (shape.size() == 1) out << ',';
  out << ')';
  return out.str();
}

}  // namespace

Array decode(std::string_view bytes) {
  if (bytes.size() < kMagicSize + 4 || bytes.substr(0, kMagicSize) != std::string_view(kMagic, kMagicSize)) {
    throw FormatError("not an NPY file (bad magic bytes)");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) |
                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw FormatError("truncated NPY header");
    for (int i = 3; i >= 0; --i) {
      header_len = (header_len << 8) | static_cast<unsigned char>(bytes[8 + i]);
    }
    offset = 12;
  } else {
    throw FormatError("unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) throw FormatError("truncated NPY header");
  const auto header = bytes.substr(offset, header_len);
  if (header.find('{') == std::string_view::npos) throw FormatError("NPY header is not a dict");

  Array array;
  array.dtype = parse_descr(header);
  if (parse_fortran_order(header)) {
    throw FormatError("Fortran-ordered NPY arrays are not supported");
  }
  array.shape = parse_shape(header);

  const std::size_t count = element_count(array.shape);
  const std::size_t item = array.dtype == Dtype::f8 ? 8 : 4;
  const auto payload = bytes.substr(offset + header_len);
  if (payload.size() != count * item) {
    throw FormatError("NPY payload holds " + std::to_string(payload.size()) +
                      " bytes but the header declares " + std::to_string(count * item));
  }
  array.values.resize(count);
  if (array.dtype == Dtype::f8) {
    std::memcpy(array.values.data(), payload.data(), count * item);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, payload.data() + i * item, item);
      array.values[i] = static_cast<double>(f);
    }
  }
  return array;
}

Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return decode(bytes);
}

std::string encode(std::span<const std::size_t> shape, std::span<const double> values,
                   Dtype dtype) {
  if (element_count(shape) != values.size()) {
    throw InvalidArgument("NPY shape does not match the number of values");
  }
  std::string dict = "{'descr': '";
  dict += dtype == Dtype::f8 ? "<f8" : "<f4";
  dict += "', 'fortran_order': False, 'shape': " + shape_literal(shape) + ", }";
  // Pad with spaces so the payload starts on an aligned offset; header ends in '\n'.
  const std::size_t preamble = kMagicSize + 2 + 2;
  const std::size_t unpadded = preamble + dict.size() + 1;
  const std::size_t padded = (unpadded + kAlignment - 1) / kAlignment * kAlignment;
  dict.append(padded - unpadded, ' ');
  dict.push_back('\n');
  if (dict.size() > 0xFFFF) throw InvalidArgument("NPY header too large for version 1.0");

  std::string out(kMagic, kMagicSize);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(dict.size() & 0xFF));
  out.push_back(static_cast<char>((dict.size() >> 8) & 0xFF));
  out += dict;

  const std::size_t item = dtype == Dtype::f8 ? 8 : 4;
  const std::size_t start = out.size();
  out.resize(start + values.size() * item);
  if (dtype == Dtype::f8) {
    std::memcpy(out.data() + start, values.data(), values.size() * item);
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto f = static_cast<float>(values[i]);
      std::memcpy(out.data() + start + i * item, &f, item);
    }
  }
  return out;
}

void write(const std::filesystem::path& path, std::span<const std::size_t> shape,
           std::span<const double> values, Dtype dtype) {
  const auto bytes = encode(shape, values, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace semrsm::npy
