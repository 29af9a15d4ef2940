#include "amvs/io_formats.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amvs/error.hpp"

namespace amvs {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::string format_number(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

struct Token {
  std::string_view text;
  int line;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back({text.substr(start, i - start), line});
  }
  return tokens;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double to_double(const Token& t) {
  double value = 0.0;
  const auto* end = t.text.data() + t.text.size();
  const auto result = std::from_chars(t.text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(value))
    parse_fail(t.line, "expected a number, got '" + std::string(t.text) + "'");
  return value;
}

long to_integer(const Token& t) {
  long value = 0;
  const auto* end = t.text.data() + t.text.size();
  const auto result = std::from_chars(t.text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end)
    parse_fail(t.line, "expected an integer, got '" + std::string(t.text) + "'");
  return value;
}

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  int line() const { return done() ? (tokens_.empty() ? 1 : tokens_.back().line) : tokens_[pos_].line; }
  const Token& next(const char* what) {
    if (done()) parse_fail(line(), std::string("unexpected end of file, expected ") + what);
    return tokens_[pos_++];
  }
  void expect(std::string_view keyword) {
    const Token& t = next(std::string(keyword).c_str());
    if (t.text != keyword) parse_fail(t.line, "expected '" + std::string(keyword) + "', got '" + std::string(t.text) + "'");
  }
  double number() { return to_double(next("a number")); }
  long integer() { return to_integer(next("an integer")); }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

template <typename T>
T byteswap_value(T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

template <typename T>
void append_le(std::string& out, T v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap_value(v);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T read_as(const char* p, bool little_endian) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  const bool native_little = std::endian::native == std::endian::little;
  if (native_little != little_endian) v = byteswap_value(v);
  return v;
}

// Reads whitespace-separated header fields of a binary format; returns the
// offset just past the single whitespace byte that ends the last field.
std::size_t read_header_fields(std::string_view bytes, int fields, std::vector<std::string_view>& out) {
  std::size_t i = 0;
  out.clear();
  while (static_cast<int>(out.size()) < fields) {
    while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
    if (i < bytes.size() && bytes[i] == '#') {
      while (i < bytes.size() && bytes[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
    if (start == i) fail(ErrorCode::ParseError, "truncated header");
    out.push_back(bytes.substr(start, i - start));
  }
  if (i >= bytes.size()) fail(ErrorCode::ParseError, "header is not followed by data");
  return i + 1;
}

int header_int(std::string_view text, const char* what) {
  int value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size() || value <= 0)
    fail(ErrorCode::ParseError, std::string("invalid ") + what + " '" + std::string(text) + "'");
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Camera files

std::optional<DepthHint> CamFile::hint(int hint_planes) const {
  if (!depth_min || !depth_interval) return std::nullopt;
  const double hi = depth_max ? *depth_max : *depth_min + *depth_interval * (depth_num ? *depth_num : hint_planes);
  if (!(*depth_min > 0.0 && hi > *depth_min)) return std::nullopt;
  return DepthHint{*depth_min, hi};
}

CamFile parse_cam(std::string_view text) {
  TokenCursor cur(tokenize(text));
  CamFile cam;
  cur.expect("extrinsic");
  Eigen::Matrix4d ext;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) ext(r, c) = cur.number();
  if (ext(3, 0) != 0.0 || ext(3, 1) != 0.0 || ext(3, 2) != 0.0 || ext(3, 3) != 1.0)
    fail(ErrorCode::ParseError, "extrinsic bottom row must be 0 0 0 1");
  cam.extrinsics.rotation = ext.topLeftCorner<3, 3>();
  cam.extrinsics.translation = ext.topRightCorner<3, 1>();

  cur.expect("intrinsic");
  const int intrinsic_line = cur.line();
  Eigen::Matrix3d k;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) k(r, c) = cur.number();
  if (k(0, 1) != 0.0 || k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0 || k(2, 2) != 1.0)
    fail(ErrorCode::UnsupportedVariant,
         "line " + std::to_string(intrinsic_line) + ": only zero-skew pinhole intrinsics are supported");
  cam.intrinsics = {k(0, 0), k(1, 1), k(0, 2), k(1, 2)};

  std::vector<double> tail;
  while (!cur.done()) tail.push_back(cur.number());
  if (tail.size() == 1 || tail.size() > 4) fail(ErrorCode::ParseError, "depth line must hold 2 to 4 numbers");
  if (tail.size() >= 2) {
    cam.depth_min = tail[0];
    cam.depth_interval = tail[1];
  }
  if (tail.size() >= 3) cam.depth_num = tail[2];
  if (tail.size() >= 4) cam.depth_max = tail[3];
  return cam;
}

std::string format_cam(const CamFile& cam) {
  std::string out = "extrinsic\n";
  const auto& r = cam.extrinsics.rotation;
  const auto& t = cam.extrinsics.translation;
  for (int i = 0; i < 3; ++i) {
    out += format_number(r(i, 0)) + ' ' + format_number(r(i, 1)) + ' ' + format_number(r(i, 2)) + ' ' +
           format_number(t(i)) + '\n';
  }
  out += "0 0 0 1\n\nintrinsic\n";
  const auto& k = cam.intrinsics;
  out += format_number(k.fx) + " 0 " + format_number(k.cx) + '\n';
  out += "0 " + format_number(k.fy) + ' ' + format_number(k.cy) + '\n';
  out += "0 0 1\n";
  if (cam.depth_min && cam.depth_interval) {
    out += '\n' + format_number(*cam.depth_min) + ' ' + format_number(*cam.depth_interval);
    if (cam.depth_num) {
      out += ' ' + format_number(*cam.depth_num);
      if (cam.depth_max) out += ' ' + format_number(*cam.depth_max);
    }
    out += '\n';
  }
  return out;
}

CamFile read_cam(const fs::path& path) {
  try {
    return parse_cam(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_cam(const fs::path& path, const CamFile& cam) { write_file(path, format_cam(cam)); }

// ---------------------------------------------------------------------------
// PFM

Array2<float> parse_pfm(std::string_view bytes) {
  std::vector<std::string_view> fields;
  const std::size_t offset = read_header_fields(bytes, 4, fields);
  if (fields[0] == "PF") fail(ErrorCode::UnsupportedVariant, "color PFM cannot be read as a single-channel map");
  if (fields[0] != "Pf") fail(ErrorCode::ParseError, "not a PFM file");
  const int width = header_int(fields[1], "width");
  const int height = header_int(fields[2], "height");
  double scale = 0.0;
  const auto res = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), scale);
  if (res.ec != std::errc() || res.ptr != fields[3].data() + fields[3].size() || scale == 0.0)
    fail(ErrorCode::ParseError, "invalid PFM scale");
  const bool little = scale < 0.0;
  const std::size_t needed = static_cast<std::size_t>(width) * height * sizeof(float);
  if (bytes.size() - offset < needed) fail(ErrorCode::ParseError, "truncated PFM payload");

  Array2<float> map(height, width);
  const char* data = bytes.data() + offset;
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      map(y, x) = read_as<float>(data + (static_cast<std::size_t>(row) * width + x) * sizeof(float), little);
    }
  }
  return map;
}

std::string format_pfm(const Array2<float>& map) {
  std::string out = "Pf\n" + std::to_string(map.width()) + ' ' + std::to_string(map.height()) + "\n-1\n";
  out.reserve(out.size() + map.size() * sizeof(float));
  for (int y = map.height() - 1; y >= 0; --y)
    for (int x = 0; x < map.width(); ++x) append_le(out, map(y, x));
  return out;
}

Array2<float> read_pfm_raw(const fs::path& path) { return parse_pfm(read_file(path)); }

void write_pfm_raw(const fs::path& path, const Array2<float>& map) { write_file(path, format_pfm(map)); }

DepthMap read_pfm(const fs::path& path) {
  const Array2<float> raw = read_pfm_raw(path);
  DepthMap depth(raw.height(), raw.width(), 0.0, false);
  for (int y = 0; y < raw.height(); ++y) {
    for (int x = 0; x < raw.width(); ++x) {
      const float v = raw(y, x);
      if (std::isfinite(v) && v > 0.0f) {
        depth.depth(y, x) = v;
        depth.valid(y, x) = 1;
      }
    }
  }
  return depth;
}

void write_pfm(const fs::path& path, const DepthMap& depth) {
  Array2<float> raw(depth.height(), depth.width(), 0.0f);
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x)
      if (depth.is_valid(y, x)) raw(y, x) = static_cast<float>(depth.depth(y, x));
  write_pfm_raw(path, raw);
}

void write_pfm(const fs::path& path, const Array2<double>& map) {
  Array2<float> raw(map.height(), map.width());
  for (std::size_t i = 0; i < map.size(); ++i) raw[i] = static_cast<float>(map[i]);
  write_pfm_raw(path, raw);
}

// ---------------------------------------------------------------------------
// pair.txt

PairList parse_pair(std::string_view text) {
  TokenCursor cur(tokenize(text));
  const long count = cur.integer();
  if (count < 0) fail(ErrorCode::ParseError, "negative view count");
  PairList pairs;
  for (long i = 0; i < count; ++i) {
    if (cur.done())
      fail(ErrorCode::ParseError, "pair list declares " + std::to_string(count) + " views but holds " +
                                      std::to_string(i));
    PairRecord rec;
    rec.ref = static_cast<int>(cur.integer());
    const long n = cur.integer();
    if (n < 0) fail(ErrorCode::ParseError, "negative source count");
    for (long j = 0; j < n; ++j) {
      PairEntry e;
      e.id = static_cast<int>(cur.integer());
      e.score = cur.number();
      rec.sources.push_back(e);
    }
    pairs.push_back(std::move(rec));
  }
  if (!cur.done()) fail(ErrorCode::ParseError, "line " + std::to_string(cur.line()) + ": trailing data in pair list");
  return pairs;
}

std::string format_pair(const PairList& pairs) {
  std::string out = std::to_string(pairs.size()) + '\n';
  for (const auto& rec : pairs) {
    out += std::to_string(rec.ref) + '\n' + std::to_string(rec.sources.size());
    for (const auto& e : rec.sources) out += ' ' + std::to_string(e.id) + ' ' + format_number(e.score);
    out += '\n';
  }
  return out;
}

PairList read_pair(const fs::path& path) { return parse_pair(read_file(path)); }

void write_pair(const fs::path& path, const PairList& pairs) { write_file(path, format_pair(pairs)); }

// ---------------------------------------------------------------------------
// PLY

namespace {
constexpr std::string_view kPlyProperties =
    "property float x\nproperty float y\nproperty float z\n"
    "property uchar red\nproperty uchar green\nproperty uchar blue\n";
}

std::string format_ply(const PointCloud& cloud) {
  std::string out = "ply\nformat binary_little_endian 1.0\nelement vertex " + std::to_string(cloud.size()) + '\n';
  out += kPlyProperties;
  out += "end_header\n";
  out.reserve(out.size() + cloud.size() * 15);
  for (const auto& p : cloud.points) {
    require(p.position.allFinite(), ErrorCode::InvalidSpec, "point cloud holds a non-finite coordinate");
    append_le(out, static_cast<float>(p.position.x()));
    append_le(out, static_cast<float>(p.position.y()));
    append_le(out, static_cast<float>(p.position.z()));
    out.append(reinterpret_cast<const char*>(p.color.data()), 3);
  }
  return out;
}

PointCloud parse_ply(std::string_view bytes) {
  const std::size_t end = bytes.find("end_header\n");
  if (bytes.substr(0, 4) != "ply\n" || end == std::string_view::npos) fail(ErrorCode::ParseError, "not a PLY file");
  const std::string_view header = bytes.substr(0, end);
  const std::string_view prefix = "ply\nformat binary_little_endian 1.0\nelement vertex ";
  if (header.substr(0, prefix.size()) != prefix) fail(ErrorCode::UnsupportedVariant, "expected binary little-endian PLY");
  const std::size_t count_end = header.find('\n', prefix.size());
  if (count_end == std::string_view::npos) fail(ErrorCode::ParseError, "truncated PLY header");
  const std::string_view count_text = header.substr(prefix.size(), count_end - prefix.size());
  std::size_t count = 0;
  const auto res = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (res.ec != std::errc() || res.ptr != count_text.data() + count_text.size())
    fail(ErrorCode::ParseError, "invalid vertex count");
  if (header.substr(count_end + 1) != kPlyProperties) fail(ErrorCode::UnsupportedVariant, "unexpected PLY properties");

  const std::size_t offset = end + std::string_view("end_header\n").size();
  if (bytes.size() - offset != count * 15) fail(ErrorCode::ParseError, "PLY payload size does not match vertex count");
  PointCloud cloud;
  cloud.points.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const char* p = bytes.data() + offset + i * 15;
    cloud.points[i].position = {read_as<float>(p, true), read_as<float>(p + 4, true), read_as<float>(p + 8, true)};
    std::memcpy(cloud.points[i].color.data(), p + 12, 3);
  }
  return cloud;
}

void write_ply(const fs::path& path, const PointCloud& cloud) { write_file(path, format_ply(cloud)); }

PointCloud read_ply(const fs::path& path) { return parse_ply(read_file(path)); }

// ---------------------------------------------------------------------------
// PGM / PPM

ColorImage parse_pnm(std::string_view bytes) {
  std::vector<std::string_view> fields;
  const std::size_t offset = read_header_fields(bytes, 4, fields);
  const bool gray = fields[0] == "P5";
  if (!gray && fields[0] != "P6") fail(ErrorCode::UnsupportedVariant, "only binary P5/P6 images are supported");
  const int width = header_int(fields[1], "width");
  const int height = header_int(fields[2], "height");
  if (header_int(fields[3], "maxval") != 255) fail(ErrorCode::UnsupportedVariant, "only 8-bit images are supported");
  const int channels = gray ? 1 : 3;
  if (bytes.size() - offset < static_cast<std::size_t>(width) * height * channels)
    fail(ErrorCode::ParseError, "truncated image payload");
  ColorImage image(height, width, 3);
  const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data() + offset);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * width + x) * channels;
      for (int c = 0; c < 3; ++c) image(y, x, c) = data[base + (gray ? 0 : c)];
    }
  }
  return image;
}

std::string format_ppm(const ColorImage& image) {
  std::string out = "P6\n" + std::to_string(image.dim1()) + ' ' + std::to_string(image.dim0()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.values().data()), image.size());
  return out;
}

ColorImage read_image(const fs::path& path) { return parse_pnm(read_file(path)); }

void write_ppm(const fs::path& path, const ColorImage& image) { write_file(path, format_ppm(image)); }

// ---------------------------------------------------------------------------
// Scene directories

namespace {
std::string view_stem(int view) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08d", view);
  return buf;
}
}  // namespace

fs::path cam_path(const fs::path& dir, int view) { return dir / "cams" / (view_stem(view) + "_cam.txt"); }
fs::path image_path(const fs::path& dir, int view) { return dir / "images" / (view_stem(view) + ".ppm"); }
fs::path gt_depth_path(const fs::path& dir, int view) { return dir / "depth_gt" / (view_stem(view) + ".pfm"); }

SceneBundle read_scene(const fs::path& dir, int hint_planes) {
  SceneBundle scene;
  if (!fs::is_directory(dir / "cams")) fail(ErrorCode::IoError, "missing cams directory in " + dir.string());
  for (int view = 0;; ++view) {
    const fs::path cp = cam_path(dir, view);
    if (!fs::exists(cp)) break;
    const CamFile cam = read_cam(cp);
    CameraView v;
    v.intrinsics = cam.intrinsics;
    v.extrinsics = cam.extrinsics;
    v.depth_hint = cam.hint(hint_planes);
    v.image_id = view;
    scene.views.push_back(v);
    scene.images.push_back(read_image(image_path(dir, view)));
  }
  if (scene.views.empty()) fail(ErrorCode::IoError, "no camera files found in " + (dir / "cams").string());

  bool has_gt = true;
  for (int view = 0; view < static_cast<int>(scene.views.size()); ++view) has_gt = has_gt && fs::exists(gt_depth_path(dir, view));
  if (has_gt)
    for (int view = 0; view < static_cast<int>(scene.views.size()); ++view)
      scene.gt_depths.push_back(read_pfm(gt_depth_path(dir, view)));

  if (fs::exists(dir / "pair.txt")) {
    const PairList pairs = read_pair(dir / "pair.txt");
    scene.pair_list.assign(scene.views.size(), {});
    for (const auto& rec : pairs) {
      if (rec.ref < 0 || rec.ref >= static_cast<int>(scene.views.size()))
        fail(ErrorCode::ParseError, "pair list references unknown view " + std::to_string(rec.ref));
      for (const auto& e : rec.sources) scene.pair_list[rec.ref].push_back(e.id);
    }
  }
  return scene;
}

PairList to_pair_list(const SceneBundle& scene) {
  PairList pairs;
  for (int ref = 0; ref < static_cast<int>(scene.pair_list.size()); ++ref) {
    PairRecord rec;
    rec.ref = ref;
    const auto& sources = scene.pair_list[ref];
    for (std::size_t k = 0; k < sources.size(); ++k)
      rec.sources.push_back({sources[k], static_cast<double>(sources.size() - k)});
    pairs.push_back(std::move(rec));
  }
  return pairs;
}

void write_scene(const fs::path& dir, const SceneBundle& scene, int hint_planes) {
  for (int view = 0; view < static_cast<int>(scene.views.size()); ++view) {
    const CameraView& v = scene.views[view];
    CamFile cam;
    cam.extrinsics = v.extrinsics;
    cam.intrinsics = v.intrinsics;
    if (v.depth_hint) {
      cam.depth_min = v.depth_hint->d_min;
      cam.depth_interval = (v.depth_hint->d_max - v.depth_hint->d_min) / hint_planes;
      cam.depth_num = hint_planes;
      cam.depth_max = v.depth_hint->d_max;
    }
    write_cam(cam_path(dir, view), cam);
    write_ppm(image_path(dir, view), scene.images.at(view));
    if (view < static_cast<int>(scene.gt_depths.size())) write_pfm(gt_depth_path(dir, view), scene.gt_depths[view]);
  }
  if (!scene.pair_list.empty()) write_pair(dir / "pair.txt", to_pair_list(scene));
}

}  // namespace amvs
