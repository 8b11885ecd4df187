#pragma once

// Image datasets (one flattened image per column), CSV and binary loaders,
// and the per-class train/test split protocols.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genet/graph.hpp"
#include "genet/matrix.hpp"

namespace genet {

struct Dataset {
  Mat x;  ///< m x N raw grayscale values
  LabelSet labels;
  std::size_t height = 0;
  std::size_t width = 0;
  std::string name;

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(x.rows()); }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(x.cols()); }

  /// Throws FormatError if the invariants (m = h*w, N = label count, finite
  /// non-negative values) do not hold.
  void validate() const;

  /// Columns `indices` in the given order, labels carried over unchanged.
  [[nodiscard]] Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// First line `label,<h>,<w>`; each further line `<label>,<p1>,...,<pm>`.
/// Raw labels are remapped to 1..Nc in order of first appearance.
[[nodiscard]] Dataset load_csv(const std::string& path);
[[nodiscard]] Dataset parse_csv(std::string_view text, std::string name);
void save_csv(const Dataset& data, const std::string& path);
[[nodiscard]] std::string format_csv(const Dataset& data);

inline constexpr std::string_view kDatasetMagic{"GEDS\0", 5};
inline constexpr std::uint16_t kDatasetFormatVersion = 1;

[[nodiscard]] Dataset load_binary(const std::string& path);
[[nodiscard]] Dataset decode_binary(std::string_view bytes, std::string name);
void save_binary(const Dataset& data, const std::string& path);
[[nodiscard]] std::string encode_binary(const Dataset& data);

enum class DataFormat { Csv, Binary };

/// Loads by explicit format.
[[nodiscard]] Dataset load_dataset(const std::string& path, DataFormat format);

enum class SplitMode { TrainPerClass, TestPerClass };

struct SplitProtocol {
  SplitMode mode = SplitMode::TrainPerClass;
  std::size_t per_class = 1;
  std::uint64_t seed = 0;
  std::size_t repeats = 10;

  void validate() const;
  /// e.g. "train 5/class" or "test 1/class".
  [[nodiscard]] std::string describe() const;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Per class, a seeded uniform subset of `per_class` samples goes to the side
/// named by the mode and the rest to the other side. Both sides keep the
/// original sample order. Throws ClassTooSmall if a class cannot leave at
/// least one sample on each side.
[[nodiscard]] Split split(const Dataset& data, const SplitProtocol& protocol,
                          std::size_t repeat_index);

}  // namespace genet
