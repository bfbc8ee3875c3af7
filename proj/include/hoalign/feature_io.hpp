#pragma once

#include <filesystem>

#include "hoalign/emission_table.hpp"
#include "hoalign/image.hpp"

namespace hoalign {

// FMAP: "FMAP", u32 version = 1, u32 H, u32 W, u32 C, H*W*C float32 row-major, H*W uint8 mask.
FeatureMap read_feature_map(const std::filesystem::path& path);
void write_feature_map(const std::filesystem::path& path, const FeatureMap& map);

struct FeatureMapHeader {
  int width = 0;
  int height = 0;
  int channels = 0;
};
/// Reads and checks only the header and the file length.
FeatureMapHeader read_feature_map_header(const std::filesystem::path& path);

// EMIT: "EMIT", u32 T, u32 S, T*S float32. NaN entries are allowed (and mean "no value").
EmissionTable read_emission_table(const std::filesystem::path& path);
void write_emission_table(const std::filesystem::path& path, const EmissionTable& table);

// Binary PGM (P5, maxval 255); nonzero pixels are in the mask.
BinaryMask read_pgm_mask(const std::filesystem::path& path);
void write_pgm_mask(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace hoalign
