#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zap/asymp.hpp"
#include "zap/finite.hpp"
#include "zap/model.hpp"
#include "zap/oracle.hpp"

namespace zap {

// Scenario ids: "example2.1", "example2.2", "example2.3" (univariate uniform
// covariate), "setup1", "setup2", "setup3" (bivariate normal covariates),
// "appg" (no covariates), "global-null" (bivariate covariates, all nulls).
struct ScenarioConfig {
  std::string id = "setup2";
  std::size_t m = 5000;
  double eps = 2.1;    // effect size
  double zeta = 1.0;   // covariate informativeness
  double eta = -2.0;   // sparsity (setup default; setup2 uses -2.5)
  double sigma = 1.0;  // alternative component scale
  double w = 0.2;      // appg: total non-null probability
  double rho = 0.5;    // appg: right-component share
  double mu_l = -2.5;  // appg: left alternative mean
  double mu_r = 2.5;   // appg: right alternative mean
  std::uint64_t seed = 1;
};

struct SimulatedTruth {
  std::vector<int> h;          // I(mu != 0)
  std::vector<double> mu;      // per-hypothesis effect
  std::vector<int> component;  // -1 left, 0 null, +1 right
};

struct SimulatedData {
  TestingInput data;
  SimulatedTruth truth;
  OracleModel model;
};

SimulatedData gen_example(int which, std::size_t m, std::uint64_t seed);
SimulatedData gen_setup(int which, const ScenarioConfig& config);
SimulatedData gen_appendix_mixture(const ScenarioConfig& config);
SimulatedData gen_global_null(std::size_t m, std::uint64_t seed);

// Dispatch on config.id; throws std::invalid_argument for unknown ids.
SimulatedData generate(const ScenarioConfig& config);

struct MetricsEntry {
  double fdp = 0.0;
  double tpr = 0.0;
  double etd = 0.0;
  std::size_t v = 0;
  std::size_t r = 0;
  bool failed = false;
};

MetricsEntry metrics(const std::vector<std::size_t>& rejected,
                     const SimulatedTruth& truth);

// Step-up rule: reject the k smallest p-values for the maximal k with
// p_(k) <= k alpha / m.
std::vector<std::size_t> bh_procedure(const std::vector<double>& p_values,
                                      double alpha);

// Two-sided p-values 2 Phi(-|z|), computed from z when available.
std::vector<double> two_sided_p(const TestingInput& data);

enum class Method { kZapAsymp, kZapFinite, kBh, kOracleZ, kOracleP };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct ReplicateOptions {
  int reps = 150;
  double alpha = 0.05;
  int threads = 0;  // 0 -> resolve from environment/hardware
  AsympConfig asymp;
  FiniteRunConfig finite;
};

struct MethodSummary {
  Method method = Method::kBh;
  double fdr = 0.0, fdr_se = 0.0;
  double tpr = 0.0, tpr_se = 0.0;
  double etd = 0.0, etd_se = 0.0;
  int failures = 0;
  std::vector<MetricsEntry> per_rep;
};

// Seeded independent repetitions (derived per-rep streams), embarrassingly
// parallel across reps with order-independent summary reductions.
std::vector<MethodSummary> replicate(const ScenarioConfig& scenario,
                                     const std::vector<Method>& methods,
                                     const ReplicateOptions& options);

}  // namespace zap
