#pragma once

// Named data functions usable from configs and the command line. Keeps runs
// reproducible: a config names its data instead of embedding expressions.

#include "tresca/assembly.hpp"

#include <string>
#include <vector>

namespace tresca {

// Vector-valued (body forces): "zero", "paper-f", "probe-fp".
VectorFn lookup_vector_function(const std::string& name);

// Scalar-valued (boundary data, controls): "zero", "one", "paper-h",
// "paper-g1", "paper-g2", "paper-z0", "probe-z".
ScalarFn lookup_scalar_function(const std::string& name);

std::vector<std::string> registry_vector_names();
std::vector<std::string> registry_scalar_names();

// Material of the reference configuration (mu = 0.3846, lambda = 0.5769).
ElasticMaterial reference_material();

}  // namespace tresca
