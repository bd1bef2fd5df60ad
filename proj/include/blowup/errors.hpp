#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

// Base for recoverable numerical failures raised by the scheme.
class SchemeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Time step exceeds the Hopf-Lax stability bound r_n |v|_inf <= m/2.
class CflViolation : public SchemeError {
public:
    using SchemeError::SchemeError;
};

// mq dt |u|^q >= 1: the linearized implicit step has no guaranteed solution.
class ExistenceViolation : public SchemeError {
public:
    using SchemeError::SchemeError;
};

// An a priori bound checked during a run failed beyond tolerance.
class MonitorViolation : public SchemeError {
public:
    using SchemeError::SchemeError;
};

}  // namespace blowup
