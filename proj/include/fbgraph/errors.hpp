#pragma once

#include <stdexcept>
#include <string>

namespace fbgraph {

// Bad numeric input: H outside (0,1), coincident times, zero frequency, ...
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// A combinatorial object violates its structural invariants.
class StructuralError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// A request exceeds an explicit size or time budget.
class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Filesystem or serialization failure.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

inline void require_structure(bool ok, const std::string& what) {
    if (!ok) throw StructuralError(what);
}

inline void require_resource(bool ok, const std::string& what) {
    if (!ok) throw ResourceError(what);
}

inline void check_hurst(double H) {
    require_domain(H > 0.0 && H < 1.0,
                   "Hurst index H=" + std::to_string(H) + " must lie in the open interval (0,1)");
}

} // namespace detail
} // namespace fbgraph
