#ifndef BTQ_ERROR_HPP
#define BTQ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace btq {

enum class ErrorKind {
  convention_violation,   // input breaks a structural contract (e.g. non-Hermitian)
  unsupported_order,      // jet/expansion order beyond the configured maximum
  geometry,               // degenerate metric, point outside the admissible region
  quadrature_resolution,  // rule too coarse for the requested assembly
  basis_mismatch,         // operators built on different quantum bases
  underdetermined,        // fewer samples than fit parameters
  domain,                 // argument outside an operation's stated domain
  config,                 // malformed or unknown configuration input
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace btq

#endif
