#include "tresca/registry.hpp"

#include <cmath>
#include <stdexcept>

namespace tresca {

// Reference configuration on the unit disk: isotropic material with
// mu = 0.3846, lambda = 0.5769, body force pulling diagonally, no normal load,
// friction bound controlled multiplicatively around the constant 2 by the
// harmonic weight x^2 - y^2, and an oscillating initial control.

VectorFn lookup_vector_function(const std::string& name) {
  if (name == "zero")
    return [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero().eval(); };
  if (name == "paper-f")
    return [](const Eigen::Vector2d& p) {
      const double s = (5.0 - p.x() * p.x() - p.y() * p.y() + p.x() * p.y()) / 4.0;
      return Eigen::Vector2d(s, s);
    };
  if (name == "probe-fp")
    return [](const Eigen::Vector2d& p) {
      return Eigen::Vector2d((p.x() + p.y()) / 10.0, (p.x() - p.y()) / 10.0);
    };
  throw std::invalid_argument("unknown vector function: " + name);
}

ScalarFn lookup_scalar_function(const std::string& name) {
  if (name == "zero") return [](const Eigen::Vector2d&) { return 0.0; };
  if (name == "one") return [](const Eigen::Vector2d&) { return 1.0; };
  if (name == "paper-h") return [](const Eigen::Vector2d&) { return 0.0; };
  if (name == "paper-g1") return [](const Eigen::Vector2d&) { return 2.0; };
  if (name == "paper-g2")
    return [](const Eigen::Vector2d& p) { return p.x() * p.x() - p.y() * p.y(); };
  if (name == "paper-z0")
    return [](const Eigen::Vector2d& p) { return std::cos(p.x() * p.x() - p.y() * p.y()); };
  if (name == "probe-z")
    return [](const Eigen::Vector2d& p) { return (p.x() + p.y()) / 2.0; };
  throw std::invalid_argument("unknown scalar function: " + name);
}

std::vector<std::string> registry_vector_names() { return {"zero", "paper-f", "probe-fp"}; }

std::vector<std::string> registry_scalar_names() {
  return {"zero", "one", "paper-h", "paper-g1", "paper-g2", "paper-z0", "probe-z"};
}

ElasticMaterial reference_material() { return {0.3846, 0.5769}; }

}  // namespace tresca
