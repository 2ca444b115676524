#include "metastab/errors.hpp"

namespace metastab {

void throw_input(const std::string& what) { throw InputError(what); }

}  // namespace metastab
