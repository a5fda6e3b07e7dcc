#include "lanesim/errors.hpp"

#include <sstream>

namespace lanesim::detail {

void invariant_failure(const char* expr, const char* file, int line) {
  std::ostringstream os;
  os << "invariant violated: " << expr << " (" << file << ":" << line << ")";
  throw InvariantError(os.str());
}

} // namespace lanesim::detail
