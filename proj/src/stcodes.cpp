#include "sfn/stcodes.hpp"

namespace sfn::stcodes {

CodeKind parse_code_kind(std::string_view name) {
  if (name == "alamouti") return CodeKind::Alamouti;
  if (name == "sm") return CodeKind::SpatialMultiplexing;
  if (name == "golden") return CodeKind::Golden;
  if (name == "3d") return CodeKind::ThreeD;
  throw std::invalid_argument("unknown space-time code '" + std::string(name) + "' (alamouti|sm|golden|3d)");
}

std::string_view code_name(CodeKind kind) {
  switch (kind) {
    case CodeKind::Alamouti: return "alamouti";
    case CodeKind::SpatialMultiplexing: return "sm";
    case CodeKind::Golden: return "golden";
    case CodeKind::ThreeD: return "3d";
  }
  return "?";
}

}  // namespace sfn::stcodes
