#include "hoalign/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "hoalign/error.hpp"

namespace hoalign {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& what) {
  fail(ErrorKind::kParseError, path.string() + ": " + what);
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) parse_fail(path, "cannot open file");
  }

  void magic(const char (&expected)[5]) {
    char m[4];
    bytes(m, 4);
    if (std::memcmp(m, expected, 4) != 0) parse_fail(path_, std::string("bad magic, expected ") + expected);
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, sizeof v);
    return v;
  }
  void bytes(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) parse_fail(path_, "unexpected end of file");
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) parse_fail(path_, "trailing bytes after payload");
  }
  std::istream& stream() { return in_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kConfigError, path.string() + ": cannot open for writing");
  return out;
}

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

constexpr std::uint32_t kMaxDim = 1u << 16;

FeatureMapHeader read_header(Reader& r) {
  r.magic("FMAP");
  const std::uint32_t version = r.u32();
  if (version != 1) parse_fail(r.path(), "unsupported FMAP version " + std::to_string(version));
  const std::uint32_t h = r.u32(), w = r.u32(), c = r.u32();
  if (h == 0 || w == 0 || c == 0 || h > kMaxDim || w > kMaxDim || c > kMaxDim) {
    parse_fail(r.path(), "invalid FMAP dimensions");
  }
  return {static_cast<int>(w), static_cast<int>(h), static_cast<int>(c)};
}

}  // namespace

FeatureMap read_feature_map(const std::filesystem::path& path) {
  Reader r(path);
  const FeatureMapHeader hdr = read_header(r);
  const std::size_t pixels = static_cast<std::size_t>(hdr.width) * static_cast<std::size_t>(hdr.height);
  std::vector<float> values(pixels * static_cast<std::size_t>(hdr.channels));
  r.bytes(values.data(), values.size() * sizeof(float));
  std::vector<std::uint8_t> mask(pixels);
  r.bytes(mask.data(), mask.size());
  r.expect_end();
  return FeatureMap(hdr.width, hdr.height, hdr.channels, std::move(values),
                    BinaryMask(hdr.width, hdr.height, std::move(mask)));
}

FeatureMapHeader read_feature_map_header(const std::filesystem::path& path) {
  Reader r(path);
  const FeatureMapHeader hdr = read_header(r);
  const std::uintmax_t pixels = static_cast<std::uintmax_t>(hdr.width) * static_cast<std::uintmax_t>(hdr.height);
  const std::uintmax_t expected = 20 + pixels * static_cast<std::uintmax_t>(hdr.channels) * 4 + pixels;
  if (std::filesystem::file_size(path) != expected) parse_fail(path, "FMAP file length does not match header");
  return hdr;
}

void write_feature_map(const std::filesystem::path& path, const FeatureMap& map) {
  std::ofstream out = open_out(path);
  out.write("FMAP", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  out.write(reinterpret_cast<const char*>(map.values().data()),
            static_cast<std::streamsize>(map.values().size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(map.mask().data().data()),
            static_cast<std::streamsize>(map.mask().data().size()));
}

EmissionTable read_emission_table(const std::filesystem::path& path) {
  Reader r(path);
  r.magic("EMIT");
  const std::uint32_t frames = r.u32(), states = r.u32();
  if (static_cast<std::uintmax_t>(frames) * states > (std::uintmax_t{1} << 32)) parse_fail(path, "EMIT table too large");
  std::vector<float> raw(static_cast<std::size_t>(frames) * states);
  r.bytes(raw.data(), raw.size() * sizeof(float));
  r.expect_end();
  return EmissionTable(frames, states, std::vector<double>(raw.begin(), raw.end()));
}

void write_emission_table(const std::filesystem::path& path, const EmissionTable& table) {
  std::ofstream out = open_out(path);
  out.write("EMIT", 4);
  put_u32(out, static_cast<std::uint32_t>(table.frames()));
  put_u32(out, static_cast<std::uint32_t>(table.states()));
  for (double v : table.costs()) {
    const float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), sizeof f);
  }
}

BinaryMask read_pgm_mask(const std::filesystem::path& path) {
  Reader r(path);
  std::istream& in = r.stream();
  // Header tokens may be separated by whitespace and '#' comments.
  auto token = [&]() {
    std::string tok;
    while (tok.empty()) {
      const int c = in.get();
      if (c == std::char_traits<char>::eof()) parse_fail(path, "truncated PGM header");
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else if (!std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        while (in.peek() != std::char_traits<char>::eof() && !std::isspace(in.peek())) tok.push_back(static_cast<char>(in.get()));
      }
    }
    return tok;
  };
  if (token() != "P5") parse_fail(path, "not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    parse_fail(path, "malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval != 255) parse_fail(path, "PGM must have positive size and maxval 255");
  in.get();  // single whitespace byte before the raster
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  r.bytes(data.data(), data.size());
  return BinaryMask(w, h, std::move(data));
}

void write_pgm_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  std::ofstream out = open_out(path);
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  for (std::uint8_t v : mask.data()) out.put(static_cast<char>(v ? 255 : 0));
}

}  // namespace hoalign
