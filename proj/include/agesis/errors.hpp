#pragma once

#include <stdexcept>
#include <string>

namespace agesis {

/// Invalid argument to a constructor or operation (non-positive mean, I0 out
/// of range, bad collocation degree, ...).
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Laplace-type integral requested outside its convergence half-plane.
class divergent_transform : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Hazard rate requested at an age where the survival has underflowed to 0.
class hazard_undefined : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Gamma shape outside the range covered by the two-rate chain construction.
class unsupported_shape : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Root finder or equilibrium solver failed to converge.
class no_convergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No purely imaginary characteristic-root pair inside the requested bracket.
class no_crossing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// More than one stability switch inside a bisection bracket.
class ambiguous_bracket : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive step size underflowed; message names the time reached.
class step_underflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trajectory window too short for attractor classification.
class insufficient_data : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario configuration file error; message names the offending key.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace agesis
