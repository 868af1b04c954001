#ifndef LANDER_ERRORS_HPP
#define LANDER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lander {

// Shape ingestion / field evaluation
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OrientationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mobility
struct PropellantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SaturationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TorqueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario front-end
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lander

#endif
