#include "buslane/types.hpp"

namespace buslane {

std::string_view to_string(VehicleClass c) {
  switch (c) {
    case VehicleClass::HDV: return "HDV";
    case VehicleClass::CHV: return "CHV";
    case VehicleClass::CAV: return "CAV";
    case VehicleClass::Bus: return "Bus";
  }
  return "?";
}

std::string_view to_string(Movement m) {
  return m == Movement::Through ? "Through" : "RightTurn";
}

std::optional<VehicleClass> parse_vehicle_class(std::string_view s) {
  if (s == "HDV") return VehicleClass::HDV;
  if (s == "CHV") return VehicleClass::CHV;
  if (s == "CAV") return VehicleClass::CAV;
  if (s == "Bus") return VehicleClass::Bus;
  return std::nullopt;
}

std::optional<Movement> parse_movement(std::string_view s) {
  if (s == "Through") return Movement::Through;
  if (s == "RightTurn") return Movement::RightTurn;
  return std::nullopt;
}

}  // namespace buslane
