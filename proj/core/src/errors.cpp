#include "hypersde/errors.hpp"

#include <sstream>

namespace hypersde {

namespace {

std::string join_indices(const std::vector<std::size_t>& idx) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) os << ',';
    os << idx[i];
  }
  os << ')';
  return os.str();
}

}  // namespace

AxiomViolation::AxiomViolation(std::string axiom, std::vector<std::size_t> witness, double residual)
    : Error("axiom violated: " + axiom + " at " + join_indices(witness) +
            " (residual " + std::to_string(residual) + ")"),
      axiom_(std::move(axiom)),
      witness_(std::move(witness)),
      residual_(residual) {}

NoIdentity::NoIdentity(const std::string& label, double residual)
    : Error("algebra '" + label + "' has no multiplicative identity (least-squares residual " +
            std::to_string(residual) + ")"),
      residual_(residual) {}

AlgebraMismatch::AlgebraMismatch(const std::string& expected, const std::string& actual)
    : Error("algebra mismatch: expected '" + expected + "', got '" + actual + "'") {}

SingularElement::SingularElement(const std::string& what, double determinant, double time)
    : MathDomainError(what), determinant_(determinant), time_(time) {}

DomainError::DomainError(const std::string& what, std::size_t offset)
    : MathDomainError(what), offset_(offset) {}

NonFinite::NonFinite(std::size_t step, double time)
    : MathDomainError("non-finite state at step " + std::to_string(step) + " (t=" +
                      std::to_string(time) + ")"),
      step_(step),
      time_(time) {}

namespace {

std::string parse_message(std::size_t offset, const std::vector<std::string>& expected,
                          const std::string& found) {
  std::ostringstream os;
  os << "parse error at offset " << offset << ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) os << " or ";
    os << '\'' << expected[i] << '\'';
  }
  os << ", found " << (found.empty() ? std::string("end of input") : "'" + found + "'");
  return os.str();
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : Error(parse_message(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

IndivisibleFactor::IndivisibleFactor(std::size_t steps, std::size_t factor)
    : Error("coarsening factor " + std::to_string(factor) + " does not divide " +
            std::to_string(steps) + " steps") {}

LengthMismatch::LengthMismatch(const std::string& what, std::size_t expected, std::size_t actual)
    : Error(what + ": expected length " + std::to_string(expected) + ", got " +
            std::to_string(actual)) {}

}  // namespace hypersde
