#include "qcs/thresholds.hpp"

#include <cstdlib>

namespace qcs {

long long threshold_perturbation() {
  static const long long offset = [] {
    const char* env = std::getenv("QCS_THRESHOLD_PERTURB");
    return env ? std::atoll(env) : 0ll;
  }();
  return offset;
}

}  // namespace qcs
