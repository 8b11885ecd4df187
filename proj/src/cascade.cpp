#include "genet/cascade.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "byte_io.hpp"

namespace genet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

LayerKind parse_kind(std::string_view name, std::string_view text) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (upper == "PCA") return LayerKind::PCA;
  if (upper == "LDA") return LayerKind::LDA;
  if (upper == "MFA") return LayerKind::MFA;
  throw Error(ErrorCode::ParseError,
              "unknown layer '" + std::string(name) + "' in '" + std::string(text) + "'");
}

std::size_t parse_dim(std::string_view token, std::string_view text) {
  long long value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::ParseError,
                "bad dimension '" + std::string(token) + "' in '" + std::string(text) + "'");
  }
  if (value < 1) {
    throw Error(ErrorCode::ParseError,
                "dimension must be positive in '" + std::string(text) + "'");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

std::string CascadeSpec::canonical() const {
  std::string names;
  std::string dims;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i > 0) {
      names += '+';
      dims += ',';
    }
    names += to_string(layers[i].kind);
    dims += std::to_string(layers[i].out_dim);
  }
  return names + "(" + dims + ")";
}

CascadeSpec parse_pipeline(std::string_view text) {
  const std::string_view body = trim(text);
  const std::size_t open = body.find('(');
  if (open == std::string_view::npos || body.back() != ')') {
    throw Error(ErrorCode::ParseError,
                "expected NAME(+NAME)*(d1,...) but got '" + std::string(text) + "'");
  }
  const auto names = split(body.substr(0, open), '+');
  const auto dims = split(body.substr(open + 1, body.size() - open - 2), ',');

  CascadeSpec spec;
  spec.source_text = std::string(text);
  for (auto name : names) {
    if (name.empty()) throw Error(ErrorCode::ParseError, "empty layer name in '" + std::string(text) + "'");
    spec.layers.push_back(LayerSpec{parse_kind(name, text), 1, std::nullopt, std::nullopt});
  }
  if (dims.size() != names.size()) {
    throw Error(ErrorCode::ParseError, std::to_string(names.size()) + " layer names but " +
                                           std::to_string(dims.size()) + " dimensions in '" +
                                           std::string(text) + "'");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) spec.layers[i].out_dim = parse_dim(dims[i], text);
  return spec;
}

std::size_t CascadeModel::input_dim() const {
  return layers.empty() ? 0 : layers.front().input_dim();
}

std::size_t CascadeModel::output_dim() const {
  return layers.empty() ? 0 : layers.back().out_dim_actual();
}

CascadeModel fit_cascade(const CascadeSpec& spec, const Mat& x, const LabelSet& labels,
                         const MfaParams& mfa, const EmbeddingOptions& options) {
  if (spec.layers.empty()) throw Error(ErrorCode::InvalidArgument, "cascade has no layers");
  CascadeModel model;
  model.spec = spec;
  if (is_supervised(spec.layers.front().kind)) {
    model.report.warnings.push_back("first layer " +
                                    std::string(to_string(spec.layers.front().kind)) +
                                    " is supervised; an unsupervised first layer is recommended");
  }

  Mat current = x;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    LayerSpec layer = spec.layers[i];
    if (layer.kind == LayerKind::MFA) {
      if (!layer.k1) layer.k1 = mfa.k1;
      if (!layer.k2) layer.k2 = mfa.k2;
    }
    model.spec.layers[i] = layer;
    LayerFit fit;
    try {
      fit = fit_layer(layer, current, labels, options);
    } catch (const Error& e) {
      throw Error(e.code(), "layer " + std::to_string(i + 1) + " (" +
                                std::string(to_string(layer.kind)) + "): " + e.detail());
    }
    current = transform_layer(fit.model, current);
    model.layers.push_back(std::move(fit.model));
    model.report.layers.push_back(std::move(fit.report));
  }
  return model;
}

Mat transform_cascade(const CascadeModel& model, const Mat& x) {
  Mat current = x;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    try {
      current = transform_layer(model.layers[i], current);
    } catch (const Error& e) {
      throw Error(e.code(), "layer " + std::to_string(i + 1) + ": " + e.detail());
    }
  }
  return current;
}

namespace {

using detail::ByteReader;
using detail::ByteWriter;
using detail::checked_u32;

void write_optional(ByteWriter& w, const std::optional<std::size_t>& v) {
  w.u8(v ? 1 : 0);
  w.u32(v ? checked_u32(*v, "k parameter") : 0);
}

std::optional<std::size_t> read_optional(ByteReader& r) {
  const std::uint8_t present = r.u8();
  const std::uint32_t value = r.u32();
  if (present > 1) throw Error(ErrorCode::FormatError, "model: bad optional flag");
  if (present == 0) return std::nullopt;
  return value;
}

void write_strings(ByteWriter& w, const std::vector<std::string>& items) {
  w.u32(checked_u32(items.size(), "string list"));
  for (const auto& s : items) w.str(s);
}

std::vector<std::string> read_strings(ByteReader& r) {
  const std::uint32_t count = r.u32();
  std::vector<std::string> items;
  for (std::uint32_t i = 0; i < count; ++i) items.push_back(r.str());
  return items;
}

}  // namespace

std::string save_model(const CascadeModel& model) {
  if (model.layers.size() != model.spec.layers.size() ||
      model.report.layers.size() != model.layers.size()) {
    throw Error(ErrorCode::InvalidArgument, "save_model: inconsistent model");
  }
  ByteWriter w;
  w.raw(kModelMagic);
  w.u16(kModelFormatVersion);
  w.str(model.spec.source_text);
  w.u32(checked_u32(model.layers.size(), "layer count"));
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerModel& layer = model.layers[i];
    const LayerReport& rep = model.report.layers[i];
    w.u8(static_cast<std::uint8_t>(layer.spec.kind));
    w.u32(checked_u32(layer.spec.out_dim, "out_dim"));
    write_optional(w, layer.spec.k1);
    write_optional(w, layer.spec.k2);
    const auto rows = static_cast<std::size_t>(layer.projection.rows());
    const auto cols = static_cast<std::size_t>(layer.projection.cols());
    w.u32(checked_u32(rows, "input dim"));
    w.u32(checked_u32(cols, "output dim"));
    for (Eigen::Index k = 0; k < layer.mean.size(); ++k) w.f64(layer.mean[k]);
    for (Eigen::Index c = 0; c < layer.projection.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.projection.rows(); ++r) w.f64(layer.projection(r, c));
    }
    w.u32(checked_u32(rep.input_dim, "report"));
    w.u32(checked_u32(rep.requested_dim, "report"));
    w.u32(checked_u32(rep.actual_dim, "report"));
    w.u32(checked_u32(rep.solve_dim, "report"));
    w.f64(rep.max_residual);
    w.f64(rep.residual_scale);
    write_strings(w, rep.warnings);
  }
  write_strings(w, model.report.warnings);
  return std::move(w).take();
}

CascadeModel load_model(std::string_view bytes) {
  ByteReader r(bytes, "model");
  if (r.remaining() < kModelMagic.size() || r.raw(kModelMagic.size()) != kModelMagic) {
    throw Error(ErrorCode::FormatError, "model: bad magic");
  }
  const std::uint16_t version = r.u16();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::FormatError, "model: unsupported version " + std::to_string(version));
  }
  CascadeModel model;
  model.spec.source_text = r.str();
  const std::uint32_t count = r.u32();
  std::size_t prev_out = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    LayerModel layer;
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(LayerKind::MFA)) {
      throw Error(ErrorCode::FormatError, "model: unknown layer kind");
    }
    layer.spec.kind = static_cast<LayerKind>(kind);
    layer.spec.out_dim = r.u32();
    layer.spec.k1 = read_optional(r);
    layer.spec.k2 = read_optional(r);
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (i > 0 && rows != prev_out) {
      throw Error(ErrorCode::FormatError, "model: layer dimensions do not chain");
    }
    // Reject sizes the remaining bytes cannot possibly hold before allocating.
    const std::uint64_t needed = (static_cast<std::uint64_t>(rows) * (1 + cols)) * 8;
    if (needed > r.remaining()) throw Error(ErrorCode::FormatError, "model: truncated layer");
    layer.mean = Vec(rows);
    for (std::uint32_t k = 0; k < rows; ++k) layer.mean[k] = r.f64();
    layer.projection = Mat(rows, cols);
    for (std::uint32_t c = 0; c < cols; ++c) {
      for (std::uint32_t k = 0; k < rows; ++k) layer.projection(k, c) = r.f64();
    }
    LayerReport rep;
    rep.input_dim = r.u32();
    rep.requested_dim = r.u32();
    rep.actual_dim = r.u32();
    rep.solve_dim = r.u32();
    rep.max_residual = r.f64();
    rep.residual_scale = r.f64();
    rep.warnings = read_strings(r);
    try {
      layer.spec.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::FormatError, "model: " + e.detail());
    }
    prev_out = cols;
    model.spec.layers.push_back(layer.spec);
    model.layers.push_back(std::move(layer));
    model.report.layers.push_back(std::move(rep));
  }
  model.report.warnings = read_strings(r);
  r.expect_end();
  return model;
}

void save_model_file(const CascadeModel& model, const std::string& path) {
  detail::write_file(path, save_model(model));
}

CascadeModel load_model_file(const std::string& path) {
  return load_model(detail::read_file(path));
}

}  // namespace genet
