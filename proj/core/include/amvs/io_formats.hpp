#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amvs/cost_volume.hpp"
#include "amvs/features.hpp"
#include "amvs/fusion.hpp"
#include "amvs/geometry.hpp"
#include "amvs/pipeline.hpp"

namespace amvs {

// Camera file in the MVSNet layout:
//
//   extrinsic
//   r00 r01 r02 t0
//   r10 r11 r12 t1
//   r20 r21 r22 t2
//   0 0 0 1
//
//   intrinsic
//   fx 0 cx
//   0 fy cy
//   0 0 1
//
//   depth_min depth_interval [depth_num [depth_max]]
struct CamFile {
  CameraExtrinsics extrinsics;
  CameraIntrinsics intrinsics;
  std::optional<double> depth_min;
  std::optional<double> depth_interval;
  std::optional<double> depth_num;
  std::optional<double> depth_max;

  // Depth hint implied by the file; without depth_max the range spans
  // `hint_planes` intervals.
  std::optional<DepthHint> hint(int hint_planes) const;
};

CamFile parse_cam(std::string_view text);
std::string format_cam(const CamFile& cam);
CamFile read_cam(const std::filesystem::path& path);
void write_cam(const std::filesystem::path& path, const CamFile& cam);

// PFM single-channel float maps. Writes little-endian (scale -1) bottom-up;
// reads either byte order. Depth maps store invalid pixels as 0.
Array2<float> parse_pfm(std::string_view bytes);
std::string format_pfm(const Array2<float>& map);
Array2<float> read_pfm_raw(const std::filesystem::path& path);
void write_pfm_raw(const std::filesystem::path& path, const Array2<float>& map);

DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const DepthMap& depth);
void write_pfm(const std::filesystem::path& path, const Array2<double>& map);

struct PairEntry {
  int id = 0;
  double score = 0.0;
};

struct PairRecord {
  int ref = 0;
  std::vector<PairEntry> sources;  // ranking as written
};

using PairList = std::vector<PairRecord>;

PairList parse_pair(std::string_view text);
std::string format_pair(const PairList& pairs);
PairList read_pair(const std::filesystem::path& path);
void write_pair(const std::filesystem::path& path, const PairList& pairs);

// Binary little-endian PLY: float x y z, uchar red green blue.
std::string format_ply(const PointCloud& cloud);
PointCloud parse_ply(std::string_view bytes);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_ply(const std::filesystem::path& path);

// Binary PGM (P5) or PPM (P6), 8-bit. Gray images are expanded to RGB.
ColorImage parse_pnm(std::string_view bytes);
std::string format_ppm(const ColorImage& image);
ColorImage read_image(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const ColorImage& image);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// Scene directory:
//   cams/00000000_cam.txt  images/00000000.ppm  [depth_gt/00000000.pfm]  [pair.txt]
std::filesystem::path cam_path(const std::filesystem::path& dir, int view);
std::filesystem::path image_path(const std::filesystem::path& dir, int view);
std::filesystem::path gt_depth_path(const std::filesystem::path& dir, int view);

SceneBundle read_scene(const std::filesystem::path& dir, int hint_planes = 192);
void write_scene(const std::filesystem::path& dir, const SceneBundle& scene, int hint_planes = 192);

PairList to_pair_list(const SceneBundle& scene);

}  // namespace amvs
