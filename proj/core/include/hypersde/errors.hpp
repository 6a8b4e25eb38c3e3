#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypersde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors that stem from the mathematics of a well-formed request: zero
// divisors, leaving a function's domain, non-convergent series. The CLI maps
// this whole family to exit status 2.
class MathDomainError : public Error {
 public:
  using Error::Error;
};

class AxiomViolation : public Error {
 public:
  AxiomViolation(std::string axiom, std::vector<std::size_t> witness, double residual);

  const std::string& axiom() const noexcept { return axiom_; }
  // 1-based indices into the structure-constant table.
  const std::vector<std::size_t>& witness() const noexcept { return witness_; }
  double residual() const noexcept { return residual_; }

 private:
  std::string axiom_;
  std::vector<std::size_t> witness_;
  double residual_;
};

class NoIdentity : public Error {
 public:
  NoIdentity(const std::string& label, double residual);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class AlgebraMismatch : public Error {
 public:
  AlgebraMismatch(const std::string& expected, const std::string& actual);
};

class SingularElement : public MathDomainError {
 public:
  SingularElement(const std::string& what, double determinant, double time = -1.0);
  double determinant() const noexcept { return determinant_; }
  // Grid time at which the singularity was hit, or a negative value when the
  // failure is not attached to a path.
  double time() const noexcept { return time_; }

 private:
  double determinant_;
  double time_;
};

class NoConvergence : public MathDomainError {
 public:
  using MathDomainError::MathDomainError;
};

class NewtonDivergence : public MathDomainError {
 public:
  using MathDomainError::MathDomainError;
};

class DomainError : public MathDomainError {
 public:
  DomainError(const std::string& what, std::size_t offset = 0);
  // Byte offset of the offending node in the expression source, if any.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class NonFinite : public MathDomainError {
 public:
  NonFinite(std::size_t step, double time);
  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

class ConsistencyError : public MathDomainError {
 public:
  using MathDomainError::MathDomainError;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class IndivisibleFactor : public Error {
 public:
  IndivisibleFactor(std::size_t steps, std::size_t factor);
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(const std::string& what, std::size_t expected, std::size_t actual);
};

}  // namespace hypersde
