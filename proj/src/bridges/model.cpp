#include "tsmc/bridges/model.hpp"

#include <vector>

#include "tsmc/core/error.hpp"

namespace tsmc {

double Model::log_prior_block(const double*, ParamTag) const {
  fail(ErrorKind::InvalidConfig, "model " + name() + " does not factor its prior across parameter groups");
}

double Model::log_likelihood(const double* theta, const RngKey& key) const {
  thread_local std::vector<double> terms;
  terms.resize(n_periods());
  log_likelihood_terms(theta, key, terms.size(), terms.data());
  double s = 0.0;
  for (double v : terms) s += v;
  return s;
}

std::vector<std::size_t> indices_with_tag(const Model& m, ParamTag tag) {
  std::vector<std::size_t> out;
  const auto& p = m.params();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].tag == tag) out.push_back(i);
  }
  return out;
}

}  // namespace tsmc
