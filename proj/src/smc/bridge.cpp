#include "tsmc/smc/bridge.hpp"

#include "tsmc/core/error.hpp"

namespace tsmc {

std::string to_string(ParamTag tag) {
  switch (tag) {
    case ParamTag::Common: return "common";
    case ParamTag::M0Only: return "m0_only";
    case ParamTag::M1Only: return "m1_only";
  }
  return "unknown";
}

double Bridge::slope(const double*) const {
  fail(ErrorKind::InvalidConfig, "bridge " + strategy() + " is not linear in phi");
}

}  // namespace tsmc
