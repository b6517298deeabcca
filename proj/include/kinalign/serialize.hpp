#pragma once

#include <nlohmann/json.hpp>

#include "kinalign/geometry.hpp"
#include "kinalign/rasterizer.hpp"

namespace kinalign {

// JSON codecs shared by dataset manifests and run configs. Transforms are
// 16-element row-major arrays; decoding validates shapes and throws
// ParseError on malformed input.

nlohmann::json transform_to_json(const RigidTransform& t);
RigidTransform transform_from_json(const nlohmann::json& j);

nlohmann::json camera_to_json(const PinholeCamera& cam);
PinholeCamera camera_from_json(const nlohmann::json& j);

nlohmann::json light_to_json(const PointLight& light);
PointLight light_from_json(const nlohmann::json& j);

nlohmann::json render_config_to_json(const SoftRenderConfig& cfg);
SoftRenderConfig render_config_from_json(const nlohmann::json& j);

}  // namespace kinalign
