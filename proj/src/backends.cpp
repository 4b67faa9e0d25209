#include <stdexcept>
#include <string>

#include "bandchol/kernels.hpp"

#ifdef BANDCHOL_HAVE_BLAS
#include "blas_kernels.hpp"
#endif

namespace bandchol {

std::vector<std::string> available_backends() {
  std::vector<std::string> names{"native"};
#ifdef BANDCHOL_HAVE_BLAS
  names.emplace_back("openblas");
#endif
  return names;
}

const KernelBackend& backend_by_name(std::string_view name) {
  if (name == "native") {
    return native_kernels();
  }
#ifdef BANDCHOL_HAVE_BLAS
  if (name == "openblas") {
    static const BlasKernels instance;
    return instance;
  }
#endif
  throw std::invalid_argument("unknown kernel backend '" + std::string(name) +
                              "'");
}

}  // namespace bandchol
