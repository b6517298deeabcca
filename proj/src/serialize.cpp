#include "kinalign/serialize.hpp"

#include "kinalign/errors.hpp"

namespace kinalign {

namespace {

double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ParseError(std::string("missing or non-numeric field: ") + key);
    }
    return j.at(key).get<double>();
}

}  // namespace

nlohmann::json transform_to_json(const RigidTransform& t) {
    const Mat4 m = t.matrix();
    nlohmann::json out = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out.push_back(m(r, c));
        }
    }
    return out;
}

RigidTransform transform_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 16) {
        throw ParseError("transform must be a 16-element row-major array");
    }
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const auto& v = j.at(4 * r + c);
            if (!v.is_number()) throw ParseError("transform entries must be numbers");
            m(r, c) = v.get<double>();
        }
    }
    return RigidTransform::from_matrix(m);
}

nlohmann::json camera_to_json(const PinholeCamera& cam) {
    return {{"fx", cam.fx},         {"fy", cam.fy},
            {"cx", cam.cx},         {"cy", cam.cy},
            {"width", cam.width},   {"height", cam.height},
            {"extrinsics", transform_to_json(cam.extrinsics)}};
}

PinholeCamera camera_from_json(const nlohmann::json& j) {
    RigidTransform extrinsics;
    if (j.contains("extrinsics")) {
        extrinsics = transform_from_json(j.at("extrinsics"));
    }
    return PinholeCamera(require_number(j, "fx"), require_number(j, "fy"),
                         require_number(j, "cx"), require_number(j, "cy"),
                         static_cast<int>(require_number(j, "width")),
                         static_cast<int>(require_number(j, "height")), extrinsics);
}

nlohmann::json light_to_json(const PointLight& light) {
    return {{"position",
             {light.position.x(), light.position.y(), light.position.z()}},
            {"intensity", light.intensity}};
}

PointLight light_from_json(const nlohmann::json& j) {
    const auto& p = j.at("position");
    if (!p.is_array() || p.size() != 3) {
        throw ParseError("light position must be a 3-element array");
    }
    return PointLight(Vec3(p.at(0).get<double>(), p.at(1).get<double>(),
                           p.at(2).get<double>()),
                      require_number(j, "intensity"));
}

nlohmann::json render_config_to_json(const SoftRenderConfig& cfg) {
    return {{"sigma", cfg.sigma},
            {"gamma", cfg.gamma},
            {"background_value", cfg.background_value}};
}

SoftRenderConfig render_config_from_json(const nlohmann::json& j) {
    SoftRenderConfig cfg;
    cfg.sigma = require_number(j, "sigma");
    cfg.gamma = require_number(j, "gamma");
    cfg.background_value = require_number(j, "background_value");
    cfg.validate();
    return cfg;
}

}  // namespace kinalign
