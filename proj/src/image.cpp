#include "hoalign/image.hpp"

#include <algorithm>
#include <string>

#include "hoalign/emission_table.hpp"
#include "hoalign/error.hpp"

namespace hoalign {

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0 ||
      data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorKind::kInvalidArgument, "mask data does not match its dimensions");
  }
  for (auto& v : data_) v = v ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

FeatureMap::FeatureMap(int width, int height, int channels, std::vector<float> values, BinaryMask mask)
    : width_(width), height_(height), channels_(channels), values_(std::move(values)), mask_(std::move(mask)) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    fail(ErrorKind::kInvalidArgument, "feature map dimensions must be positive");
  }
  const std::size_t expected =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(channels);
  if (values_.size() != expected) {
    fail(ErrorKind::kInvalidArgument, "feature map holds " + std::to_string(values_.size()) + " values, expected " +
                                          std::to_string(expected));
  }
  if (mask_.width() != width || mask_.height() != height) {
    fail(ErrorKind::kInvalidArgument, "feature map mask dimensions differ from the feature grid");
  }
}

FeatureMap FeatureMap::with_mask(BinaryMask mask) const {
  return FeatureMap(width_, height_, channels_, values_, std::move(mask));
}

EmissionTable::EmissionTable(std::size_t frames, std::size_t states, std::vector<double> costs)
    : frames_(frames), states_(states), costs_(std::move(costs)) {
  if (costs_.size() != frames * states) fail(ErrorKind::kInvalidArgument, "emission table size mismatch");
}

}  // namespace hoalign
