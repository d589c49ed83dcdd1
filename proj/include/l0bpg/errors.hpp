#pragma once

#include <stdexcept>
#include <string>

namespace l0bpg {

/// Bad input: malformed data, inconsistent dimensions, invalid configuration.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public InputError {
public:
  explicit DimensionMismatch(const std::string& what) : InputError(what) {}
};

/// A point has mass on an index where the reference point has none.
class SupportViolation : public InputError {
public:
  explicit SupportViolation(const std::string& what) : InputError(what) {}
};

class ParseError : public InputError {
public:
  explicit ParseError(const std::string& what) : InputError(what) {}
};

/// The numerics broke down: non-finite values, stalled line search, no root.
class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

class LineSearchStall : public NumericalFailure {
public:
  explicit LineSearchStall(const std::string& what) : NumericalFailure(what) {}
};

class InfeasibleCardinality : public NumericalFailure {
public:
  explicit InfeasibleCardinality(const std::string& what) : NumericalFailure(what) {}
};

}  // namespace l0bpg
