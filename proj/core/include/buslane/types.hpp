#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace buslane {

enum class VehicleClass { HDV, CHV, CAV, Bus };
enum class Movement { Through, RightTurn };

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// CHV, CAV and buses carry on-board units; HDVs do not.
constexpr bool is_connected(VehicleClass c) { return c != VehicleClass::HDV; }

/// Classes that run ACC/CACC rather than a human driver model.
constexpr bool is_automated(VehicleClass c) {
  return c == VehicleClass::CAV || c == VehicleClass::Bus;
}

constexpr bool is_general(VehicleClass c) { return c != VehicleClass::Bus; }

std::string_view to_string(VehicleClass c);
std::string_view to_string(Movement m);
std::optional<VehicleClass> parse_vehicle_class(std::string_view s);
std::optional<Movement> parse_movement(std::string_view s);

/// Malformed input file (syntax or type errors).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input whose values break a documented invariant.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised by the simulator when a physical invariant breaks mid-run.
class InvariantBreach : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace buslane
