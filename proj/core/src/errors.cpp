#include "rigidity/errors.hpp"

namespace rigidity {

void throw_invalid(std::string_view what) { throw InvalidArgument(std::string(what)); }

}  // namespace rigidity
