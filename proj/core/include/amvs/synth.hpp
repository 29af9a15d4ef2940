#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "amvs/pipeline.hpp"

namespace amvs {

enum class SynthGeometry { Plane, Sphere, TwoPlanes, Wedge };
enum class SynthTexture { Noise, Checker };

// Analytic scene seen by a reference camera at the world origin looking down
// +z, plus sources on a circle of radius `baseline` around it. Every geometry
// except a lone plane has a background plane at `far`.
//
//   plane       z = (near + far) / 2 + slope * x
//   sphere      sphere of radius sphere_radius touching z = near on the axis
//   two_planes  z = near for x < 0, z = far for x >= 0, joined by a wall at x = 0
//   wedge       z = near + s |x|, with s chosen so the image edges reach far
struct SynthSceneSpec {
  SynthGeometry geometry = SynthGeometry::Sphere;
  SynthTexture texture = SynthTexture::Noise;
  int num_views = 5;
  int width = 80;
  int height = 64;
  double focal = 0.0;  // pixels; 0 selects 1.5 * width
  double baseline = 250.0;
  double near = 500.0;
  double far = 850.0;
  double slope = 0.0;
  double sphere_radius = 0.0;  // 0 selects 0.3 * (far - near)
  bool converge = true;        // sources look at the middle of the depth range
  int supersample = 3;
  // Depth hint written to every camera: [hint_min, hint_min + hint_interval * hint_planes].
  double hint_min = 425.0;
  double hint_interval = 2.5;
  int hint_planes = 192;
  std::uint64_t seed = 1;

  double focal_length() const { return focal > 0.0 ? focal : 1.5 * width; }
  double sphere_r() const { return sphere_radius > 0.0 ? sphere_radius : 0.3 * (far - near); }
  void validate() const;
};

// Nearest positive ray parameter where origin + t * dir meets the scene.
std::optional<double> synth_ray_hit(const SynthSceneSpec& spec, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& dir);

// Texture brightness in [0, 1] at a world point.
double synth_texture(const SynthSceneSpec& spec, const Eigen::Vector3d& point);

std::vector<CameraView> synth_views(const SynthSceneSpec& spec);

SceneBundle synth_scene(const SynthSceneSpec& spec);

std::string to_string(SynthGeometry geometry);
std::string to_string(SynthTexture texture);
SynthGeometry parse_geometry(const std::string& text);
SynthTexture parse_texture(const std::string& text);

}  // namespace amvs
