#pragma once

#include <stdexcept>
#include <string>

namespace chemflow {

/// Base class of every error thrown by the simulator.
class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or violated precondition (CLI exit code 3).
class ConfigError : public SimError {
public:
    using SimError::SimError;
};

/// No admissible (theta, eta) pair on the search grid for the weighted-Lp functional.
class InfeasibleParams : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Linear-solver failure (CLI exit code 4).
class SolverError : public SimError {
public:
    using SimError::SimError;
};

/// Neumann Poisson right-hand side with nonzero mean.
class IncompatibleRhs : public SolverError {
public:
    using SolverError::SolverError;
};

/// Iteration cap reached before the residual tolerance.
class NoConvergence : public SolverError {
public:
    using SolverError::SolverError;
};

/// A scheme invariant failed at runtime (CLI exit code 2).
class InvariantError : public SimError {
public:
    using SimError::SimError;
};

/// Time step exceeds the stability bound.
class CflViolation : public InvariantError {
public:
    using InvariantError::InvariantError;
};

/// Density dropped below -pos_tol; the time step is too large.
class PositivityLoss : public InvariantError {
public:
    using InvariantError::InvariantError;
};

/// sup-norm of the oxygen field increased; signals a scheme bug.
class MonotonicityLoss : public InvariantError {
public:
    using InvariantError::InvariantError;
};

/// Nonpositive density where a logarithm is required.
class NonpositiveDensity : public InvariantError {
public:
    using InvariantError::InvariantError;
};

/// File I/O and serialization errors.
class IoError : public SimError {
public:
    using SimError::SimError;
};

/// Snapshot magic bytes or checksum mismatch.
class SnapshotFormatError : public IoError {
public:
    using IoError::IoError;
};

/// Snapshot format version not understood by this build.
class UnsupportedVersion : public IoError {
public:
    using IoError::IoError;
};

} // namespace chemflow
