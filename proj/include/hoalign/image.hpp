#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hoalign {

/// Row-major H x W binary mask; nonzero means "in".
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int col, int row) const { return data_[index(col, row)] != 0; }
  void set(int col, int row, bool value) { data_[index(col, row)] = value ? 1 : 0; }
  std::span<const std::uint8_t> data() const { return data_; }
  std::size_t count() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Dense H x W x C feature grid (row-major, channel-interleaved) with a silhouette mask.
class FeatureMap {
 public:
  FeatureMap() = default;
  /// Throws InvalidArgument when `values` or `mask` do not match the stated dimensions.
  FeatureMap(int width, int height, int channels, std::vector<float> values, BinaryMask mask);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  const BinaryMask& mask() const { return mask_; }
  std::span<const float> values() const { return values_; }

  std::span<const float> feature(int col, int row) const {
    const std::size_t base =
        (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col)) *
        static_cast<std::size_t>(channels_);
    return std::span<const float>(values_).subspan(base, static_cast<std::size_t>(channels_));
  }

  FeatureMap with_mask(BinaryMask mask) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> values_;
  BinaryMask mask_;
};

}  // namespace hoalign
