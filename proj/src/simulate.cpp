#include "zap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "zap/numeric.hpp"
#include "zap/parallel.hpp"
#include "zap/rng.hpp"

namespace zap {

namespace {

constexpr std::uint64_t kDataStream = 2;
constexpr std::uint64_t kMethodStream = 3;

struct ComponentDraw {
  double w_l = 0.0, w_r = 0.0;
  double mu_l = 0.0, mu_r = 0.0;
  double sigma = 1.0;
};

// Shared generator: per hypothesis draw covariates, then the component, then
// the z-value, in that order.
SimulatedData run_generator(
    std::size_t m, std::size_t p, std::uint64_t seed,
    const std::function<void(Rng&, std::vector<double>&)>& draw_covariates,
    const std::function<ComponentDraw(std::span<const double>)>& mixture,
    OracleModel model) {
  Rng rng(derive_seed(seed, kDataStream));
  std::vector<double> z(m), x(m * p);
  SimulatedTruth truth;
  truth.h.resize(m);
  truth.mu.resize(m);
  truth.component.resize(m);

  std::vector<double> xi(p);
  for (std::size_t i = 0; i < m; ++i) {
    draw_covariates(rng, xi);
    std::copy(xi.begin(), xi.end(), x.begin() + i * p);
    const ComponentDraw cd = mixture(xi);
    const double cu = rng.uniform();
    const double noise = rng.normal();
    double mu = 0.0;
    int comp = 0;
    double scale = 1.0;
    if (cu < cd.w_l) {
      mu = cd.mu_l;
      comp = -1;
      scale = cd.sigma;
    } else if (cu < cd.w_l + cd.w_r) {
      mu = cd.mu_r;
      comp = 1;
      scale = cd.sigma;
    }
    z[i] = mu + scale * noise;
    truth.mu[i] = mu;
    truth.component[i] = comp;
    truth.h[i] = comp == 0 ? 0 : 1;
  }

  SimulatedData out;
  out.data = TestingInput::from_z(std::move(z), std::move(x), p);
  out.truth = std::move(truth);
  out.model = std::move(model);
  return out;
}

void draw_uniform_covariate(Rng& rng, std::vector<double>& x) {
  x[0] = rng.uniform(-1.0, 1.0);
}

void draw_bivariate_covariates(Rng& rng, std::vector<double>& x) {
  const double s = std::sqrt(0.5);
  x[0] = s * rng.normal();
  x[1] = s * rng.normal();
}

}  // namespace

SimulatedData gen_example(int which, std::size_t m, std::uint64_t seed) {
  OracleModel model;
  std::function<ComponentDraw(std::span<const double>)> mixture;
  switch (which) {
    case 1:
      model.components.push_back(
          {[](std::span<const double> x) { return (x[0] + 2.0) / 10.0; },
           [](std::span<const double>) { return 1.5; }, 1.0});
      mixture = [](std::span<const double> x) {
        return ComponentDraw{0.0, (x[0] + 2.0) / 10.0, 0.0, 1.5, 1.0};
      };
      break;
    case 2:
      model.components.push_back(
          {[](std::span<const double> x) { return (1.0 - x[0]) / 10.0; },
           [](std::span<const double>) { return -1.5; }, 1.0});
      model.components.push_back(
          {[](std::span<const double> x) { return (1.0 + x[0]) / 10.0; },
           [](std::span<const double>) { return 1.5; }, 1.0});
      mixture = [](std::span<const double> x) {
        return ComponentDraw{(1.0 - x[0]) / 10.0, (1.0 + x[0]) / 10.0, -1.5,
                             1.5, 1.0};
      };
      break;
    case 3:
      model.components.push_back(
          {[](std::span<const double>) { return 0.1; },
           [](std::span<const double> x) { return x[0] >= 0.0 ? 1.5 : -1.5; },
           1.0});
      mixture = [](std::span<const double> x) {
        // Book-keep the component label by the sign of the alternative mean.
        if (x[0] >= 0.0) return ComponentDraw{0.0, 0.1, 0.0, 1.5, 1.0};
        return ComponentDraw{0.1, 0.0, -1.5, 0.0, 1.0};
      };
      break;
    default:
      throw std::invalid_argument("gen_example: unknown example id");
  }
  return run_generator(m, 1, seed, draw_uniform_covariate, mixture,
                       std::move(model));
}

SimulatedData gen_setup(int which, const ScenarioConfig& config) {
  const double eps = config.eps;
  const double zeta = config.zeta;
  const double eta = config.eta;
  const double sigma = config.sigma;
  auto xdot = [](std::span<const double> x) { return x[0] + x[1]; };

  OracleModel model;
  std::function<ComponentDraw(std::span<const double>)> mixture;
  switch (which) {
    case 1: {
      auto w_r = [eta, zeta, xdot](std::span<const double> x) {
        return 1.0 / (1.0 + std::exp(-eta - zeta * xdot(x)));
      };
      auto mu_r = [eps, zeta, xdot](std::span<const double> x) {
        return 2.0 * eps / (1.0 + std::exp(-zeta * xdot(x)));
      };
      model.components.push_back({w_r, mu_r, sigma});
      mixture = [w_r, mu_r, sigma](std::span<const double> x) {
        return ComponentDraw{0.0, w_r(x), 0.0, mu_r(x), sigma};
      };
      break;
    }
    case 2: {
      auto w_r = [eta, zeta, xdot](std::span<const double> x) {
        const double t = zeta * xdot(x);
        return std::exp(t) / (std::exp(-eta) + std::exp(-t) + std::exp(t));
      };
      auto w_l = [eta, zeta, xdot](std::span<const double> x) {
        const double t = zeta * xdot(x);
        return std::exp(-t) / (std::exp(-eta) + std::exp(-t) + std::exp(t));
      };
      model.components.push_back(
          {w_l, [eps](std::span<const double>) { return -eps; }, sigma});
      model.components.push_back(
          {w_r, [eps](std::span<const double>) { return eps; }, sigma});
      mixture = [w_l, w_r, eps, sigma](std::span<const double> x) {
        return ComponentDraw{w_l(x), w_r(x), -eps, eps, sigma};
      };
      break;
    }
    case 3: {
      const double w = 0.5 / (1.0 + std::exp(-eta));
      auto mu_r = [eps, zeta, xdot](std::span<const double> x) {
        return 2.0 * eps / (1.0 + std::exp(-zeta * xdot(x)));
      };
      auto mu_l = [eps, zeta, xdot](std::span<const double> x) {
        return -2.0 * eps / (1.0 + std::exp(zeta * xdot(x)));
      };
      model.components.push_back(
          {[w](std::span<const double>) { return w; }, mu_l, sigma});
      model.components.push_back(
          {[w](std::span<const double>) { return w; }, mu_r, sigma});
      mixture = [w, mu_l, mu_r, sigma](std::span<const double> x) {
        return ComponentDraw{w, w, mu_l(x), mu_r(x), sigma};
      };
      break;
    }
    default:
      throw std::invalid_argument("gen_setup: unknown setup id");
  }
  return run_generator(config.m, 2, config.seed, draw_bivariate_covariates,
                       mixture, std::move(model));
}

SimulatedData gen_appendix_mixture(const ScenarioConfig& config) {
  if (!(config.w >= 0.0 && config.w < 1.0) ||
      !(config.rho >= 0.0 && config.rho <= 1.0)) {
    throw std::invalid_argument("gen_appendix_mixture: invalid (w, rho)");
  }
  const double w_l = config.w * (1.0 - config.rho);
  const double w_r = config.w * config.rho;
  const double mu_l = config.mu_l;
  const double mu_r = config.mu_r;
  OracleModel model;
  if (w_l > 0.0) {
    model.components.push_back({[w_l](std::span<const double>) { return w_l; },
                                [mu_l](std::span<const double>) { return mu_l; },
                                1.0});
  }
  if (w_r > 0.0) {
    model.components.push_back({[w_r](std::span<const double>) { return w_r; },
                                [mu_r](std::span<const double>) { return mu_r; },
                                1.0});
  }
  return run_generator(
      config.m, 0, config.seed, [](Rng&, std::vector<double>&) {},
      [w_l, w_r, mu_l, mu_r](std::span<const double>) {
        return ComponentDraw{w_l, w_r, mu_l, mu_r, 1.0};
      },
      std::move(model));
}

SimulatedData gen_global_null(std::size_t m, std::uint64_t seed) {
  return run_generator(
      m, 2, seed, draw_bivariate_covariates,
      [](std::span<const double>) { return ComponentDraw{}; }, OracleModel{});
}

SimulatedData generate(const ScenarioConfig& config) {
  if (config.m < 1) throw std::invalid_argument("generate: m must be >= 1");
  if (config.id == "example2.1") return gen_example(1, config.m, config.seed);
  if (config.id == "example2.2") return gen_example(2, config.m, config.seed);
  if (config.id == "example2.3") return gen_example(3, config.m, config.seed);
  if (config.id == "setup1") return gen_setup(1, config);
  if (config.id == "setup2") return gen_setup(2, config);
  if (config.id == "setup3") return gen_setup(3, config);
  if (config.id == "appg") return gen_appendix_mixture(config);
  if (config.id == "global-null") return gen_global_null(config.m, config.seed);
  throw std::invalid_argument("generate: unknown scenario id '" + config.id +
                              "'");
}

MetricsEntry metrics(const std::vector<std::size_t>& rejected,
                     const SimulatedTruth& truth) {
  MetricsEntry e;
  for (std::size_t i : rejected) {
    if (i >= truth.h.size()) {
      throw std::invalid_argument("metrics: rejected index out of range");
    }
    ++e.r;
    if (truth.h[i] == 0) ++e.v;
  }
  const std::size_t signals =
      static_cast<std::size_t>(std::count(truth.h.begin(), truth.h.end(), 1));
  e.fdp = static_cast<double>(e.v) /
          static_cast<double>(std::max<std::size_t>(e.r, 1));
  e.etd = static_cast<double>(e.r - e.v);
  e.tpr = e.etd / static_cast<double>(std::max<std::size_t>(signals, 1));
  return e;
}

std::vector<std::size_t> bh_procedure(const std::vector<double>& p_values,
                                      double alpha) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("bh_procedure: p-values must lie in [0,1]");
    }
  }
  std::vector<double> sorted(p_values);
  std::sort(sorted.begin(), sorted.end());
  double cut = -1.0;
  for (std::size_t k = m; k >= 1; --k) {
    if (sorted[k - 1] <=
        static_cast<double>(k) * alpha / static_cast<double>(m)) {
      cut = sorted[k - 1];
      break;
    }
  }
  std::vector<std::size_t> rejected;
  if (cut >= 0.0) {
    for (std::size_t i = 0; i < m; ++i) {
      if (p_values[i] <= cut) rejected.push_back(i);
    }
  }
  return rejected;
}

std::vector<double> two_sided_p(const TestingInput& data) {
  std::vector<double> p(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    p[i] = data.has_z() ? 2.0 * normal_cdf(-std::abs(data.z[i]))
                        : 2.0 * std::min(data.u[i], 1.0 - data.u[i]);
  }
  return p;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::kZapAsymp:
      return "zap-asymp";
    case Method::kZapFinite:
      return "zap-finite";
    case Method::kBh:
      return "bh";
    case Method::kOracleZ:
      return "oracle-z";
    case Method::kOracleP:
      return "oracle-p";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "zap-asymp") return Method::kZapAsymp;
  if (name == "zap-finite") return Method::kZapFinite;
  if (name == "bh") return Method::kBh;
  if (name == "oracle-z") return Method::kOracleZ;
  if (name == "oracle-p") return Method::kOracleP;
  throw std::invalid_argument("unknown method '" + name + "'");
}

namespace {

// Compensated summation keeps the summary reduction order-independent in
// practice across platforms and rep counts.
struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void summarize(std::vector<MetricsEntry>& per_rep, MethodSummary& out) {
  KahanSum fdp, tpr, etd;
  int n = 0;
  for (const auto& e : per_rep) {
    if (e.failed) {
      ++out.failures;
      continue;
    }
    fdp.add(e.fdp);
    tpr.add(e.tpr);
    etd.add(e.etd);
    ++n;
  }
  if (n == 0) return;
  out.fdr = fdp.sum / n;
  out.tpr = tpr.sum / n;
  out.etd = etd.sum / n;
  if (n > 1) {
    KahanSum v_fdp, v_tpr, v_etd;
    for (const auto& e : per_rep) {
      if (e.failed) continue;
      v_fdp.add((e.fdp - out.fdr) * (e.fdp - out.fdr));
      v_tpr.add((e.tpr - out.tpr) * (e.tpr - out.tpr));
      v_etd.add((e.etd - out.etd) * (e.etd - out.etd));
    }
    const double dn = static_cast<double>(n);
    out.fdr_se = std::sqrt(v_fdp.sum / (dn - 1.0) / dn);
    out.tpr_se = std::sqrt(v_tpr.sum / (dn - 1.0) / dn);
    out.etd_se = std::sqrt(v_etd.sum / (dn - 1.0) / dn);
  }
  out.per_rep = std::move(per_rep);
}

}  // namespace

std::vector<MethodSummary> replicate(const ScenarioConfig& scenario,
                                     const std::vector<Method>& methods,
                                     const ReplicateOptions& options) {
  if (options.reps < 1) {
    throw std::invalid_argument("replicate: reps must be >= 1");
  }
  const int threads = resolve_threads(options.threads);
  const std::size_t reps = static_cast<std::size_t>(options.reps);

  std::vector<std::vector<MetricsEntry>> table(
      methods.size(), std::vector<MetricsEntry>(reps));

  parallel_for(reps, threads, [&](std::size_t rep) {
    ScenarioConfig local = scenario;
    local.seed = derive_seed(scenario.seed, kDataStream + 16 * rep);
    const std::uint64_t method_seed =
        derive_seed(scenario.seed, kMethodStream + 16 * rep);
    const SimulatedData sim = generate(local);

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      MetricsEntry& slot = table[mi][rep];
      try {
        std::vector<std::size_t> rejected;
        switch (methods[mi]) {
          case Method::kZapAsymp: {
            AsympConfig c = options.asymp;
            c.seed = method_seed;
            c.threads = 1;  // repetitions already run in parallel
            rejected =
                run_zap_asymp(sim.data, options.alpha, c).rejection.rejected;
            break;
          }
          case Method::kZapFinite: {
            FiniteRunConfig c = options.finite;
            c.alpha = options.alpha;
            c.seed = method_seed;
            rejected = run_zap_finite(sim.data, c).rejection.rejected;
            break;
          }
          case Method::kBh:
            rejected = bh_procedure(two_sided_p(sim.data), options.alpha);
            break;
          case Method::kOracleZ:
            rejected = run_oracle(sim.model, OracleMode::kZScale, sim.data,
                                  options.alpha)
                           .rejected;
            break;
          case Method::kOracleP:
            rejected = run_oracle(sim.model, OracleMode::kPScale, sim.data,
                                  options.alpha)
                           .rejected;
            break;
        }
        slot = metrics(rejected, sim.truth);
      } catch (const std::exception&) {
        slot.failed = true;  // record, keep the batch going
      }
    }
  });

  std::vector<MethodSummary> summaries(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    summaries[mi].method = methods[mi];
    summarize(table[mi], summaries[mi]);
  }
  return summaries;
}

}  // namespace zap
