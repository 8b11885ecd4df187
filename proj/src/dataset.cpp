#include "genet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>

#include "byte_io.hpp"
#include "genet/random.hpp"

namespace genet {

void Dataset::validate() const {
  if (labels.size() != size()) {
    throw Error(ErrorCode::FormatError, "dataset has " + std::to_string(size()) + " samples but " +
                                            std::to_string(labels.size()) + " labels");
  }
  if (height * width != dim()) {
    throw Error(ErrorCode::FormatError, "image size " + std::to_string(height) + "x" +
                                            std::to_string(width) + " does not match dimension " +
                                            std::to_string(dim()));
  }
  if (!x.allFinite() || (x.size() > 0 && x.minCoeff() < 0.0)) {
    throw Error(ErrorCode::FormatError, "pixel values must be finite and non-negative");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.x = Mat(x.rows(), static_cast<Eigen::Index>(indices.size()));
  std::vector<int> ids;
  ids.reserve(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    out.x.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(indices[j]));
    ids.push_back(labels[indices[j]]);
  }
  out.labels = LabelSet::from_ids(std::move(ids));
  out.height = height;
  out.width = width;
  out.name = name;
  return out;
}

namespace {

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::FormatError,
                "line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Dataset parse_csv(std::string_view text, std::string name) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::FormatError, "empty CSV");

  const auto header = fields_of(lines.front());
  if (header.size() != 3) {
    throw Error(ErrorCode::FormatError, "header must be 'label,<height>,<width>'");
  }
  Dataset data;
  data.name = std::move(name);
  data.height = parse_number<std::size_t>(header[1], 1);
  data.width = parse_number<std::size_t>(header[2], 1);
  const std::size_t m = data.height * data.width;
  if (m == 0) throw Error(ErrorCode::FormatError, "image size must be positive");

  const std::size_t n = lines.size() - 1;
  data.x = Mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::vector<long long> raw;
  raw.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lineno = j + 2;
    const auto fields = fields_of(lines[j + 1]);
    if (fields.size() != m + 1) {
      throw Error(ErrorCode::FormatError, "line " + std::to_string(lineno) + ": expected " +
                                              std::to_string(m) + " pixels, got " +
                                              std::to_string(fields.size() - 1));
    }
    raw.push_back(parse_number<long long>(fields[0], lineno));
    for (std::size_t k = 0; k < m; ++k) {
      data.x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          parse_number<double>(fields[k + 1], lineno);
    }
  }
  data.labels = LabelSet::remap(raw);
  data.validate();
  return data;
}

Dataset load_csv(const std::string& path) { return parse_csv(detail::read_file(path), stem_of(path)); }

std::string format_csv(const Dataset& data) {
  data.validate();
  std::string out = "label," + std::to_string(data.height) + "," + std::to_string(data.width) + "\n";
  char buf[64];
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    out += std::to_string(data.labels[static_cast<std::size_t>(j)]);
    for (Eigen::Index k = 0; k < data.x.rows(); ++k) {
      // Shortest form that parses back to the same double.
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), data.x(k, j));
      out += ',';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& data, const std::string& path) {
  detail::write_file(path, format_csv(data));
}

std::string encode_binary(const Dataset& data) {
  data.validate();
  detail::ByteWriter w;
  w.raw(kDatasetMagic);
  w.u16(kDatasetFormatVersion);
  w.u32(detail::checked_u32(data.dim(), "dimension"));
  w.u32(detail::checked_u32(data.size(), "sample count"));
  w.u32(detail::checked_u32(data.height, "height"));
  w.u32(detail::checked_u32(data.width, "width"));
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    for (Eigen::Index k = 0; k < data.x.rows(); ++k) w.f64(data.x(k, j));
  }
  for (int id : data.labels.ids()) w.u32(static_cast<std::uint32_t>(id));
  return std::move(w).take();
}

Dataset decode_binary(std::string_view bytes, std::string name) {
  detail::ByteReader r(bytes, "dataset");
  if (r.remaining() < kDatasetMagic.size() || r.raw(kDatasetMagic.size()) != kDatasetMagic) {
    throw Error(ErrorCode::FormatError, "dataset: bad magic");
  }
  const std::uint16_t version = r.u16();
  if (version != kDatasetFormatVersion) {
    throw Error(ErrorCode::FormatError, "dataset: unsupported version " + std::to_string(version));
  }
  const std::uint32_t m = r.u32();
  const std::uint32_t n = r.u32();
  Dataset data;
  data.name = std::move(name);
  data.height = r.u32();
  data.width = r.u32();
  const std::uint64_t needed = static_cast<std::uint64_t>(m) * n * 8 + static_cast<std::uint64_t>(n) * 4;
  if (needed != r.remaining()) {
    throw Error(ErrorCode::FormatError, "dataset: payload is " + std::to_string(r.remaining()) +
                                            " bytes, expected " + std::to_string(needed));
  }
  data.x = Mat(m, n);
  for (std::uint32_t j = 0; j < n; ++j) {
    for (std::uint32_t k = 0; k < m; ++k) data.x(k, j) = r.f64();
  }
  std::vector<int> ids(n);
  for (auto& id : ids) {
    const std::uint32_t v = r.u32();
    if (v < 1 || v > n) throw Error(ErrorCode::FormatError, "dataset: label out of range");
    id = static_cast<int>(v);
  }
  r.expect_end();
  try {
    data.labels = LabelSet::from_ids(std::move(ids));
  } catch (const Error& e) {
    throw Error(ErrorCode::FormatError, "dataset: " + e.detail());
  }
  data.validate();
  return data;
}

Dataset load_binary(const std::string& path) {
  return decode_binary(detail::read_file(path), stem_of(path));
}

void save_binary(const Dataset& data, const std::string& path) {
  detail::write_file(path, encode_binary(data));
}

Dataset load_dataset(const std::string& path, DataFormat format) {
  return format == DataFormat::Csv ? load_csv(path) : load_binary(path);
}

void SplitProtocol::validate() const {
  if (per_class < 1) throw Error(ErrorCode::InvalidArgument, "split needs per_class >= 1");
  if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "split needs repeats >= 1");
}

std::string SplitProtocol::describe() const {
  return std::string(mode == SplitMode::TrainPerClass ? "train " : "test ") +
         std::to_string(per_class) + "/class";
}

Split split(const Dataset& data, const SplitProtocol& protocol, std::size_t repeat_index) {
  protocol.validate();
  const LabelSet& labels = data.labels;
  std::vector<bool> to_train(data.size(), false);
  for (int c = 1; c <= labels.num_classes(); ++c) {
    const auto& members = labels.members(c);
    if (members.size() <= protocol.per_class) {
      throw Error(ErrorCode::ClassTooSmall,
                  "class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                      " samples; " + protocol.describe() + " needs more than " +
                      std::to_string(protocol.per_class));
    }
    std::vector<std::size_t> order = members;
    Rng rng(derive_seed({protocol.seed, repeat_index, static_cast<std::uint64_t>(c)}));
    shuffle(std::span<std::size_t>(order), rng);
    const bool chosen_is_train = protocol.mode == SplitMode::TrainPerClass;
    for (std::size_t t = 0; t < order.size(); ++t) {
      const bool chosen = t < protocol.per_class;
      to_train[order[t]] = chosen == chosen_is_train;
    }
  }
  Split out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (to_train[i] ? out.train_indices : out.test_indices).push_back(i);
  }
  out.train = data.subset(out.train_indices);
  out.test = data.subset(out.test_indices);
  return out;
}

}  // namespace genet
