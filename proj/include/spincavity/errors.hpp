// errors.hpp — error taxonomy: configuration problems versus physics-validity
// violations (the dispersive description does not apply to the requested point).

#pragma once

#include <stdexcept>

namespace spincavity {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhysicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spincavity
