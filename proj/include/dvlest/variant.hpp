#pragma once

#include <string>

#include "dvlest/errors.hpp"

namespace dvlest {

enum class ModelVariant { BeamsNetV1, BeamsNetV2, SnmnnV1, SnmnnV2 };

inline std::string variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::BeamsNetV1: return "beamsnet-v1";
    case ModelVariant::BeamsNetV2: return "beamsnet-v2";
    case ModelVariant::SnmnnV1: return "snmnn-v1";
    case ModelVariant::SnmnnV2: return "snmnn-v2";
  }
  return "?";
}

inline ModelVariant variant_from_name(const std::string& s) {
  if (s == "beamsnet-v1") return ModelVariant::BeamsNetV1;
  if (s == "beamsnet-v2") return ModelVariant::BeamsNetV2;
  if (s == "snmnn-v1") return ModelVariant::SnmnnV1;
  if (s == "snmnn-v2") return ModelVariant::SnmnnV2;
  throw ConfigError("unknown model variant '" + s +
                    "' (expected beamsnet-v1|beamsnet-v2|snmnn-v1|snmnn-v2)");
}

inline bool is_beamsnet(ModelVariant v) {
  return v == ModelVariant::BeamsNetV1 || v == ModelVariant::BeamsNetV2;
}

inline bool uses_imu(ModelVariant v) {
  return v == ModelVariant::BeamsNetV1 || v == ModelVariant::SnmnnV1;
}

}  // namespace dvlest
