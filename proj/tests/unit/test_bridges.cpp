#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "helpers.hpp"
#include "tsmc/bridges/bridges.hpp"
#include "tsmc/bridges/tempering.hpp"
#include "tsmc/core/error.hpp"
#include "tsmc/models/toy.hpp"
#include "tsmc/smc/engine.hpp"

using namespace tsmc;
using tsmc::testing::ConjugateNormal;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Independent N(0, 1) priors (or Exp(1) for `positive` coordinates) and a
/// Gaussian likelihood centred at `centre` with per-coordinate precision.
class GaussModel final : public Model {
 public:
  GaussModel(std::string name, std::vector<ParamInfo> info, Vec centre, Vec precision, std::vector<bool> positive = {})
      : name_(std::move(name)), info_(std::move(info)), centre_(std::move(centre)), prec_(std::move(precision)),
        positive_(std::move(positive)) {
    positive_.resize(info_.size(), false);
  }

  std::string name() const override { return name_; }
  const std::vector<ParamInfo>& params() const override { return info_; }
  double log_prior(const double* t) const override {
    double lp = 0.0;
    for (std::size_t j = 0; j < info_.size(); ++j) lp += coord_prior(j, t[j]);
    return lp;
  }
  double log_prior_block(const double* t, ParamTag tag) const override {
    double lp = 0.0;
    for (std::size_t j = 0; j < info_.size(); ++j) {
      if (info_[j].tag == tag) lp += coord_prior(j, t[j]);
    }
    return lp;
  }
  void sample_prior(Rng& rng, double* t) const override {
    for (std::size_t j = 0; j < info_.size(); ++j) t[j] = positive_[j] ? -std::log(rng.uniform()) : rng.normal();
  }
  bool deterministic() const override { return true; }
  std::size_t n_periods() const override { return 1; }
  void log_likelihood_terms(const double* t, const RngKey&, std::size_t n, double* out) const override {
    if (n == 0) return;
    double ll = 0.0;
    for (std::size_t j = 0; j < info_.size(); ++j) {
      const double z = t[j] - centre_[static_cast<Eigen::Index>(j)];
      ll -= 0.5 * prec_[static_cast<Eigen::Index>(j)] * z * z;
    }
    out[0] = ll;
  }
  Vec reference_point() const override { return Vec::Constant(static_cast<Eigen::Index>(info_.size()), 0.5); }

 private:
  double coord_prior(std::size_t j, double x) const {
    if (positive_[j]) return x > 0.0 ? -x : kNegInf;
    return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
  }

  std::string name_;
  std::vector<ParamInfo> info_;
  Vec centre_, prec_;
  std::vector<bool> positive_;
};

/// M0 = (c1, c2, a), M1 = (c1, c2, b1, b2) with a tagged M0-only and b M1-only.
std::pair<ModelPtr, ModelPtr> tagged_pair() {
  Vec c0(3), p0(3), c1(4), p1(4);
  c0 << 0.5, -0.3, 1.0;
  p0 << 4.0, 2.0, 3.0;
  c1 << 0.6, -0.2, 0.8, -1.0;
  p1 << 3.0, 2.5, 1.5, 2.0;
  auto m0 = std::make_shared<GaussModel>(
      "m0", std::vector<ParamInfo>{{"c1", "real", ParamTag::Common}, {"c2", "real", ParamTag::Common},
                                   {"a", "real", ParamTag::M0Only}},
      c0, p0);
  auto m1 = std::make_shared<GaussModel>(
      "m1", std::vector<ParamInfo>{{"c1", "real", ParamTag::Common}, {"c2", "real", ParamTag::Common},
                                   {"b1", "real", ParamTag::M1Only}, {"b2", "positive", ParamTag::M1Only}},
      c1, p1, std::vector<bool>{false, false, false, true});
  return {m0, m1};
}

double kernel(const Bridge& b, const double* theta, double phi) {
  std::vector<double> cache(b.cache_width());
  b.evaluate(theta, RngKey{1, 2, 3, 4}, cache.data());
  const double lp = b.log_prior(theta);
  if (lp == kNegInf) return kNegInf;
  return lp + b.log_likelihood(phi, cache.data());
}

double loglik(const Bridge& b, const double* theta, double phi) {
  std::vector<double> cache(b.cache_width());
  b.evaluate(theta, RngKey{1, 2, 3, 4}, cache.data());
  return b.log_likelihood(phi, cache.data());
}

std::shared_ptr<ConjugateNormal> conjugate(int n = 30, std::uint64_t seed = 77) {
  Rng rng(seed);
  Vec y(n);
  for (auto& v : y) v = rng.normal(0.8, 1.5);
  return std::make_shared<ConjugateNormal>(y, 1.5, 0.0, 4.0);
}

SmcConfig cfg(std::uint64_t seed, int n) {
  SmcConfig c;
  c.seed = seed;
  c.n_particles = n;
  return c;
}

/// Asymptotic two-sample Kolmogorov-Smirnov p-value.
double ks_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size() * b.size()) / static_cast<double>(a.size() + b.size());
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

template <class F>
ErrorKind error_kind(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidConfig;
}

}  // namespace

TEST_CASE("kernels at the end points") {
  auto [m0, m1] = tagged_pair();
  const double theta[] = {0.3, -0.7, 1.2, 0.4};
  const double theta0[] = {0.3, -0.7, 0.9};
  const Vec fixed = Vec::Constant(1, 0.9);
  ModelTempering mt(m0, m1, 1.0, Theta0Mode::Fixed, fixed);
  const RngKey key{};
  const double l0 = m0->log_likelihood(theta0, key);
  const double l1 = m1->log_likelihood(theta, key);
  const double lp = m1->log_prior(theta);
  CHECK(kernel(mt, theta, 0.0) == doctest::Approx(l0 + lp).epsilon(1e-14));
  CHECK(kernel(mt, theta, 1.0) == doctest::Approx(l1 + lp).epsilon(1e-14));

  LikelihoodTempering lt(m1);
  CHECK(kernel(lt, theta, 0.0) == doctest::Approx(lp).epsilon(1e-14));
  CHECK(kernel(lt, theta, 1.0) == doctest::Approx(l1 + lp).epsilon(1e-14));

  auto cn = conjugate(12);
  const double t1[] = {0.4};
  const double full = cn->log_likelihood(t1, key);
  DataTemperingPrefix dt(cn);
  DataTemperingAnchored da(cn, 4);
  CHECK(kernel(dt, t1, 1.0) == doctest::Approx(full + cn->log_prior(t1)).epsilon(1e-13));
  CHECK(kernel(da, t1, 1.0) == doctest::Approx(full + cn->log_prior(t1)).epsilon(1e-13));
  CHECK(kernel(dt, t1, 0.0) == doctest::Approx(cn->log_prior(t1)).epsilon(1e-14));
}

TEST_CASE("toy bridge matches the geometric mean of two normals") {
  ToyBridge b({-3.0, 0.2});
  const NormalDensity nd = b.bridge_density(0.9);
  // Closed form: precision 0.1/0.04 + 0.9, mean 0.1 * 25 * (-3) / precision.
  const double prec = 0.1 / 0.04 + 0.9;
  CHECK(nd.sd == doctest::Approx(1.0 / std::sqrt(prec)).epsilon(1e-14));
  CHECK(nd.mean == doctest::Approx(-7.5 / prec).epsilon(1e-14));
  double offset = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double x = -3.0 + 0.35 * k;
    const double k_log = kernel(b, &x, 0.9);
    const double p0 = -0.5 * std::pow((x + 3.0) / 0.2, 2) - std::log(0.2) - 0.5 * std::log(2.0 * std::numbers::pi);
    const double p1 = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    CHECK(std::abs(k_log - (0.9 * p1 + 0.1 * p0)) <= 1e-10);
    // Up to a constant, the kernel is the normalised bridge density.
    const double diff = k_log - nd.log_pdf(x);
    if (k == 0) offset = diff;
    CHECK(std::abs(diff - offset) <= 1e-10);
  }
}

TEST_CASE("likelihood and model tempering kernels are linear in phi") {
  auto [m0, m1] = tagged_pair();
  ModelTempering mt(m0, m1, 0.6, Theta0Mode::Fixed, Vec::Constant(1, 0.2));
  ModelTempering mte(m0, m1, 0.6, Theta0Mode::Enlarged);
  LikelihoodTempering lt(m1);
  const double theta[] = {0.3, -0.7, 1.2, 0.4, -0.5};
  for (const Bridge* b : std::initializer_list<const Bridge*>{&mt, &mte, &lt}) {
    const double k0 = kernel(*b, theta, 0.0), k1 = kernel(*b, theta, 1.0);
    for (double phi : {0.3, 0.7}) CHECK(std::abs(kernel(*b, theta, phi) - ((1 - phi) * k0 + phi * k1)) <= 1e-12);
    std::vector<double> cache(b->cache_width());
    b->evaluate(theta, RngKey{}, cache.data());
    CHECK(b->linear_in_phi());
    CHECK(b->slope(cache.data()) == doctest::Approx(loglik(*b, theta, 1.0) - loglik(*b, theta, 0.0)).epsilon(1e-13));
  }
}

TEST_CASE("parameter partition under model tempering") {
  auto [m0, m1] = tagged_pair();
  ModelTempering mt(m0, m1, 1.0, Theta0Mode::Enlarged);
  REQUIRE(mt.dim() == 5);
  CHECK(mt.layout()[4].name == "a");
  CHECK(mt.layout()[4].tag == ParamTag::M0Only);
  const double base[] = {0.3, -0.7, 1.2, 0.4, -0.5};
  const double h = 1e-4;
  auto bump = [&](std::size_t j) {
    std::vector<double> t(base, base + 5);
    t[j] += h;
    return t;
  };
  // theta_1 = (b1, b2) at indices 2, 3; theta_0 = a at index 4.
  for (std::size_t j : {2, 3}) {
    const auto t = bump(j);
    CHECK(loglik(mt, t.data(), 0.0) == loglik(mt, base, 0.0));
    CHECK(loglik(mt, t.data(), 1.0) != loglik(mt, base, 1.0));
  }
  {
    const auto t = bump(4);
    CHECK(loglik(mt, t.data(), 1.0) == loglik(mt, base, 1.0));
    CHECK(loglik(mt, t.data(), 0.0) != loglik(mt, base, 0.0));
  }
  for (std::size_t j : {0, 1}) {
    const auto t = bump(j);
    CHECK(loglik(mt, t.data(), 0.0) != loglik(mt, base, 0.0));
    CHECK(loglik(mt, t.data(), 1.0) != loglik(mt, base, 1.0));
  }
  // The enlarged prior adds the M0-only block to M1's prior.
  CHECK(mt.log_prior(base) ==
        doctest::Approx(m1->log_prior(base) - 0.5 * 0.25 - 0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("fixed theta_0 is held at the supplied value") {
  auto [m0, m1] = tagged_pair();
  ModelTempering mt(m0, m1, 1.0, Theta0Mode::Fixed, Vec::Constant(1, 0.9));
  CHECK(mt.dim() == 4);
  const double theta[] = {0.3, -0.7, 1.2, 0.4};
  double t0[3];
  mt.m0_theta(theta, t0);
  CHECK(t0[0] == 0.3);
  CHECK(t0[1] == -0.7);
  CHECK(t0[2] == 0.9);
}

TEST_CASE("prefix data tempering is a step function in phi") {
  auto cn = conjugate(10);
  DataTemperingPrefix dt(cn);
  const double theta[] = {0.25};
  std::vector<double> terms(10);
  cn->log_likelihood_terms(theta, RngKey{}, 10, terms.data());
  double partial = 0.0;
  for (int k = 0; k < 10; ++k) {
    for (double frac : {0.0, 0.2, 0.5, 0.999}) {
      const double phi = (k + frac) / 10.0;
      CHECK(loglik(dt, theta, phi) == doctest::Approx(partial).epsilon(1e-13));
    }
    partial += terms[static_cast<std::size_t>(k)];
  }
  CHECK(loglik(dt, theta, 1.0) == doctest::Approx(partial).epsilon(1e-13));
  CHECK(dt.sample_size(0.3) == 3);
  CHECK(dt.sample_size(0.7) == 7);
  CHECK(dt.snap_phi(0.31, 0.0) == doctest::Approx(0.4));
  CHECK(dt.snap_phi(0.3, 0.0) == doctest::Approx(0.3));
  CHECK(dt.snap_phi(0.05, 0.1) == doctest::Approx(0.2));
  CHECK(dt.snap_phi(0.97, 0.9) == 1.0);
}

TEST_CASE("data tempering runs recover the exact MDD") {
  auto cn = conjugate(30);
  const double exact = cn->exact_log_mdd();
  for (auto variant : {DataTemperingVariant::Prefix, DataTemperingVariant::Anchored}) {
    std::vector<double> est;
    for (std::uint64_t s = 1; s <= 20; ++s) {
      const auto r = run_data_tempering(cn, variant, 5, cfg(s, 500));
      est.push_back(r.log_mdd);
      if (variant == DataTemperingVariant::Prefix) {
        for (double phi : r.main.schedule) CHECK(std::abs(phi * 30.0 - std::round(phi * 30.0)) < 1e-9);
      }
    }
    const double se = tsmc::testing::sample_sd(est) / std::sqrt(20.0);
    CHECK(std::abs(tsmc::testing::sample_mean(est) - exact) <= 3.0 * se);
  }
  CHECK(error_kind([&] { DataTemperingAnchored(cn, 30); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("the kernel is -inf exactly off the prior support") {
  auto [m0, m1] = tagged_pair();
  ModelTempering mt(m0, m1, 0.5, Theta0Mode::Fixed, Vec::Constant(1, 0.0));
  LikelihoodTempering lt(m1);
  const double on[] = {0.1, 0.2, 0.3, 0.4};
  const double off[] = {0.1, 0.2, 0.3, -0.4};
  for (const Bridge* b : std::initializer_list<const Bridge*>{&mt, &lt}) {
    for (double phi : {0.0, 0.5, 1.0}) {
      CHECK(std::isfinite(kernel(*b, on, phi)));
      CHECK(kernel(*b, off, phi) == kNegInf);
    }
  }
}

TEST_CASE("stage-0 swarms") {
  auto [m0, m1] = tagged_pair();
  SUBCASE("likelihood tempering starts from unit-weight prior draws") {
    LikelihoodTempering lt(m1);
    const SmcConfig c = cfg(9, 50);
    const auto ps = init_stage0(lt, c);
    CHECK(ps.phi == 0.0);
    for (double w : ps.log_weights) CHECK(w == 0.0);
    for (std::size_t i = 0; i < 50; ++i) {
      Rng rng(RngKey{9, 0, i, substep::kStage0Draw});
      double t[4];
      m1->sample_prior(rng, t);
      for (int j = 0; j < 4; ++j) CHECK(ps.values(static_cast<Eigen::Index>(i), j) == t[j]);
    }
  }
  SUBCASE("model tempering takes theta_c from the M0 swarm and theta_1 from the prior") {
    const SmcConfig c = cfg(10, 2000);
    const auto m0_run = run_tempered_m0(m0, 0.7, c);
    auto mt = make_mt_bridge(m0, m1, 0.7, Theta0Mode::Fixed, m0_run);
    const auto ps = init_stage0(*mt, c, &m0_run);
    const auto& src = m0_run.final_particles.values;
    for (Eigen::Index i = 0; i < ps.values.rows(); ++i) {
      bool found = false;
      for (Eigen::Index k = 0; k < src.rows() && !found; ++k) {
        found = src(k, 0) == ps.values(i, 0) && src(k, 1) == ps.values(i, 1);
      }
      CHECK(found);
    }
    const Vec b1 = ps.values.col(2);
    const Vec b2 = ps.values.col(3);
    CHECK(std::abs(b1.mean()) < 3.0 / std::sqrt(2000.0));
    CHECK(b2.minCoeff() > 0.0);
    CHECK(std::abs(b2.mean() - 1.0) < 3.0 / std::sqrt(2000.0));
    const Vec mean = weighted_moments(m0_run.final_particles).mean;
    double t0[3];
    mt->m0_theta(ps.values.row(0).data(), t0);
    CHECK(t0[2] == mean[2]);
  }
  SUBCASE("model tempering cannot sample its own stage 0") {
    ModelTempering mt(m0, m1, 0.5, Theta0Mode::Enlarged);
    CHECK(error_kind([&] { init_stage0(mt, cfg(1, 10)); }) == ErrorKind::InvalidConfig);
  }
}

TEST_CASE("a nearly untempered M0 swarm looks like the prior") {
  auto [m0, m1] = tagged_pair();
  const SmcConfig c = cfg(12, 2000);
  const auto m0_run = run_tempered_m0(m0, 1e-7, c);
  auto mt = make_mt_bridge(m0, m1, 1e-7, Theta0Mode::Enlarged, m0_run);
  const auto ps = init_stage0(*mt, c, &m0_run);
  // Compare with independent draws from the same priors.
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(mt->dim()); ++j) {
    const Vec col = ps.values.col(j);
    const std::vector<double> swarm(col.data(), col.data() + col.size());
    std::vector<double> prior;
    for (std::size_t i = 0; i < 2000; ++i) {
      Rng rng(RngKey{999, 1, i, 0});
      double t1[4], t0[3];
      m1->sample_prior(rng, t1);
      m0->sample_prior(rng, t0);
      prior.push_back(j < 4 ? t1[j] : t0[2]);
    }
    CHECK(ks_pvalue(swarm, prior) > 0.01);
  }
}

TEST_CASE("tempered conjugate posterior") {
  auto cn = conjugate(30);
  for (double psi : {0.2, 0.5, 1.0}) {
    std::vector<double> vars, means;
    for (std::uint64_t s = 1; s <= 20; ++s) {
      const auto r = run_tempered_m0(cn, psi, cfg(s, 1000));
      CHECK(r.final_particles.phi == psi);
      CHECK(r.schedule.back() == psi);
      const auto m = weighted_moments(r.final_particles);
      vars.push_back(m.cov(0, 0));
      means.push_back(m.mean[0]);
    }
    const double v = cn->tempered_posterior_variance(psi);
    CHECK(std::abs(tsmc::testing::sample_mean(vars) - v) <= 3.0 * tsmc::testing::sample_sd(vars) / std::sqrt(20.0));
    CHECK(std::abs(tsmc::testing::sample_mean(means) - cn->tempered_posterior_mean(psi)) <=
          3.0 * tsmc::testing::sample_sd(means) / std::sqrt(20.0));
  }
}

TEST_CASE("M0 stage count is weakly increasing in psi") {
  auto cn = conjugate(60, 5);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    int prev = 0;
    for (double psi : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      const int n = run_tempered_m0(cn, psi, cfg(s, 400)).n_stages;
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("psi = 0 model tempering is likelihood tempering") {
  auto [m0, m1] = tagged_pair();
  const SmcConfig c = cfg(31, 300);
  const auto a = run_model_tempering(m0, m1, 0.0, c);
  const auto b = run_likelihood_tempering(m1, c);
  CHECK(a.main.final_particles.values == b.main.final_particles.values);
  CHECK(a.log_mdd == b.log_mdd);
  CHECK(a.bridge->strategy() == "lt");
}

TEST_CASE("a stored M0 run gives the same model-tempering run") {
  auto [m0, m1] = tagged_pair();
  const SmcConfig c = cfg(32, 300);
  const auto fresh = run_model_tempering(m0, m1, 0.5, c);
  ModelTemperingOptions opt;
  opt.m0_run = &fresh.preliminary;
  const auto reused = run_model_tempering(m0, m1, 0.5, c, opt);
  CHECK(reused.main.final_particles.values == fresh.main.final_particles.values);
  CHECK(reused.log_mdd == fresh.log_mdd);
  CHECK(fresh.log_mdd == doctest::Approx(log_mdd_ratio(fresh.preliminary) + log_mdd_ratio(fresh.main)));
  const auto wrong = run_tempered_m0(m0, 0.4, c);
  opt.m0_run = &wrong;
  CHECK(error_kind([&] { run_model_tempering(m0, m1, 0.5, c, opt); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("single-jump log weights under model tempering") {
  auto [m0, m1] = tagged_pair();
  const SmcConfig c = cfg(33, 200);
  const auto r = run_model_tempering(m0, m1, 0.4, c);
  const auto& mt = dynamic_cast<const ModelTempering&>(*r.bridge);
  const auto init = init_stage0(mt, c, &r.preliminary);
  const Vec jump = jump_log_weights(mt, init);
  REQUIRE(jump.size() == 200);
  CHECK(r.stage0_jump == jump);
  for (Eigen::Index i = 0; i < 200; ++i) {
    CHECK(jump[i] == doctest::Approx(init.cache(i, 0) - 0.4 * init.cache(i, 1)).epsilon(1e-13));
  }
}

TEST_CASE("layout checks") {
  auto [m0, m1] = tagged_pair();
  auto renamed = std::make_shared<GaussModel>(
      "m1", std::vector<ParamInfo>{{"c2", "real", ParamTag::Common}, {"c1", "real", ParamTag::Common}},
      Vec::Zero(2), Vec::Ones(2));
  auto fewer = std::make_shared<GaussModel>("m1", std::vector<ParamInfo>{{"c1", "real", ParamTag::Common}},
                                            Vec::Zero(1), Vec::Ones(1));
  auto mistagged = std::make_shared<GaussModel>(
      "m1", std::vector<ParamInfo>{{"c1", "real", ParamTag::Common}, {"c2", "real", ParamTag::Common},
                                   {"z", "real", ParamTag::M0Only}},
      Vec::Zero(3), Vec::Ones(3));
  CHECK(error_kind([&] { check_common_layout(*m0, *renamed); }) == ErrorKind::LayoutMismatch);
  CHECK(error_kind([&] { check_common_layout(*m0, *fewer); }) == ErrorKind::LayoutMismatch);
  CHECK(error_kind([&] { check_common_layout(*m0, *mistagged); }) == ErrorKind::LayoutMismatch);
  CHECK_NOTHROW(check_common_layout(*m0, *m1));
  CHECK(error_kind([&] { ModelTempering(m0, m1, 0.5, Theta0Mode::Fixed, Vec()); }) == ErrorKind::LayoutMismatch);
  CHECK(error_kind([&] { ModelTempering(m0, m1, 0.0, Theta0Mode::Enlarged); }) == ErrorKind::InvalidConfig);
  CHECK(error_kind([&] { ModelTempering(m0, m1, 1.5, Theta0Mode::Enlarged); }) == ErrorKind::InvalidConfig);

  const auto m1_run = run_tempered_m0(m1, 0.5, cfg(1, 50));
  CHECK(error_kind([&] { make_mt_bridge(m0, m1, 0.5, Theta0Mode::Fixed, m1_run); }) == ErrorKind::LayoutMismatch);
  ModelTempering mt(m0, m1, 0.5, Theta0Mode::Enlarged);
  CHECK(error_kind([&] { mt.stage0_values(RowMat::Zero(5, 4), 1); }) == ErrorKind::LayoutMismatch);

  const auto m0_run = run_tempered_m0(m0, 0.5, cfg(1, 50));
  CHECK(error_kind([&] { init_stage0(mt, cfg(1, 60), &m0_run); }) == ErrorKind::LayoutMismatch);
}

TEST_CASE("the preliminary run uses its own stream") {
  CHECK(preliminary_seed(5) != 5);
  CHECK(preliminary_seed(5) != preliminary_seed(6));
  CHECK(preliminary_seed(5) == preliminary_seed(5));
}
