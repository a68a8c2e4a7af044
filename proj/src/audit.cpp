#include "curvgraph/audit.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include "curvgraph/curvature.hpp"
#include "curvgraph/error.hpp"
#include "curvgraph/functionals.hpp"
#include "curvgraph/operators.hpp"
#include "curvgraph/parallel.hpp"
#include "curvgraph/random.hpp"
#include "curvgraph/report.hpp"
#include "curvgraph/semigroup.hpp"
#include "curvgraph/transport.hpp"

namespace curvgraph {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDeterministicDensities = 64;
constexpr double kTwoBlockEpsilon = 1e-3;
constexpr double kSigma2[] = {0.25, 1.0, 4.0};

std::size_t deterministic_count(std::size_t n) {
  return std::min(n, kMaxDeterministicDensities);
}

std::string density_label(const MarkovChain& chain, std::size_t trials, std::size_t i) {
  std::ostringstream os;
  const std::size_t k = deterministic_count(chain.size());
  if (i < trials) {
    os << "density=" << i << " sigma2=" << kSigma2[i % 3];
  } else if (i < trials + k) {
    os << "dirac x=" << chain.labels()[i - trials];
  } else {
    os << "two-block x=" << chain.labels()[i - trials - k];
  }
  return os.str();
}

void require_positive_constant(double c, const char* what) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " must be positive and finite");
  }
}

void require_matching(const MarkovChain& chain, const DistanceMatrix& d) {
  if (d.size() != chain.size()) {
    throw Error(ErrorCode::dimension_mismatch, "distance matrix does not match the chain");
  }
}

Field measure_of(const MarkovChain& chain, std::span<const double> f) {
  Field m(chain.size());
  for (std::size_t x = 0; x < m.size(); ++x) m[x] = f[x] * chain.stationary(x);
  return m;
}

Field stationary_field(const MarkovChain& chain) {
  return Field(chain.stationary().begin(), chain.stationary().end());
}

AuditRecord with_witness(AuditRecord rec, std::span<const double> f) {
  if (!rec.pass) rec.witness.assign(f.begin(), f.end());
  return rec;
}

// Runs `body` over every density and concatenates the per-density records.
template <typename Body>
std::vector<AuditRecord> over_densities(const MarkovChain& chain, std::size_t trials,
                                        std::uint64_t seed, Body body) {
  const auto densities = audit_densities(chain, trials, seed);
  std::vector<std::vector<AuditRecord>> slots(densities.size());
  parallel_for(densities.size(), [&](std::size_t i) {
    slots[i] = body(densities[i], density_label(chain, trials, i));
  });
  std::vector<AuditRecord> out;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(out));
  return out;
}

double mean_sqrt_gamma(const MarkovChain& chain, std::span<const double> f) {
  Field g = gamma(chain, f);
  for (double& v : g) v = std::sqrt(std::max(v, 0.0));
  return integrate(chain, g);
}

}  // namespace

AuditDistances make_audit_distances(const MarkovChain& chain, bool with_gamma) {
  AuditDistances out{graph_distance(chain), std::nullopt};
  if (with_gamma) out.gamma = d_gamma(chain);
  return out;
}

std::vector<Field> audit_densities(const MarkovChain& chain, std::size_t trials,
                                   std::uint64_t seed) {
  const std::size_t n = chain.size();
  const std::size_t k = deterministic_count(n);
  std::vector<Field> out;
  out.reserve(trials + 2 * k);
  for (std::size_t i = 0; i < trials; ++i) {
    auto rng = make_stream(seed, 0xDE05, i);
    out.push_back(random_density(chain, rng, std::sqrt(kSigma2[i % 3])));
  }
  for (std::size_t x = 0; x < k; ++x) {
    Field f(n, 0.0);
    f[x] = 1.0 / chain.stationary(x);
    out.push_back(std::move(f));
  }
  for (std::size_t x = 0; x < k; ++x) {
    Field f(n, 1.0 - kTwoBlockEpsilon);
    f[x] += kTwoBlockEpsilon / chain.stationary(x);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<AuditRecord> audit_cd_suite(const MarkovChain& chain, double kappa,
                                        std::size_t trials, std::uint64_t seed,
                                        const AuditDistances* distances) {
  require_positive_constant(kappa, "kappa");
  AuditDistances own;
  if (distances == nullptr || !distances->gamma) {
    own = make_audit_distances(chain, true);
    distances = &own;
  }
  const DistanceMatrix& dg = distances->graph;
  const DistanceMatrix& dgamma = *distances->gamma;
  require_matching(chain, dg);
  require_matching(chain, dgamma);
  const double j = chain.laziness();
  const Field pi = stationary_field(chain);
  const double k2 = kappa * kappa;

  return over_densities(chain, trials, seed, [&](const Field& f, const std::string& label) {
    const Field m = measure_of(chain, f);
    const double info = fisher(f, chain).value;
    const double w_gamma = wasserstein_p(m, pi, dgamma, 1.0).value;
    const double w_graph = wasserstein_p(m, pi, dg, 1.0).value;
    const double weak = weak_transport(pi, m, dg).value;
    std::vector<AuditRecord> recs;
    recs.push_back(with_witness(make_record(TheoremTag::cd_w1_information_dgamma, label,
                                            w_gamma * w_gamma, 2.0 / k2 * info), f));
    recs.push_back(with_witness(make_record(TheoremTag::cd_w1_information_dgraph, label,
                                            w_graph * w_graph, j / k2 * info), f));
    recs.push_back(with_witness(make_record(TheoremTag::cd_cheeger, label, w_gamma,
                                            mean_sqrt_gamma(chain, f) / kappa), f));
    recs.push_back(with_witness(make_record(TheoremTag::cd_weak_dirichlet, label, weak,
                                            std::sqrt(2.0) * j / k2 *
                                                dirichlet_energy(f, chain)), f));
    return recs;
  });
}

std::vector<AuditRecord> audit_cd_gamma_dual_suite(const MarkovChain& chain, double kappa,
                                                   std::size_t trials, std::uint64_t seed) {
  require_positive_constant(kappa, "kappa");
  const double k2 = kappa * kappa;
  return over_densities(chain, trials, seed, [&](const Field& f, const std::string& label) {
    Field c(chain.size());
    for (std::size_t x = 0; x < c.size(); ++x) c[x] = (f[x] - 1.0) * chain.stationary(x);
    const GammaPotential dual = gamma_dual_cost(chain, c, 1e-11);
    const double w = dual.value + dual.gap;
    std::vector<AuditRecord> recs;
    recs.push_back(with_witness(make_record(TheoremTag::cd_w1_information_gamma_dual, label,
                                            w * w, 2.0 / k2 * fisher(f, chain).value),
                                f));
    recs.push_back(with_witness(make_record(TheoremTag::cd_cheeger_gamma_dual, label, w,
                                            mean_sqrt_gamma(chain, f) / kappa),
                                f));
    return recs;
  });
}

std::vector<AuditRecord> audit_cde_suite(const MarkovChain& chain, double kappa_e,
                                         std::size_t trials, std::uint64_t seed,
                                         const AuditDistances* distances) {
  require_positive_constant(kappa_e, "kappa_e");
  AuditDistances own;
  if (distances == nullptr) {
    own = make_audit_distances(chain, false);
    distances = &own;
  }
  const DistanceMatrix& dg = distances->graph;
  require_matching(chain, dg);
  const double factor = 2.0 * chain.laziness() / (kappa_e * kappa_e);
  const Field pi = stationary_field(chain);

  return over_densities(chain, trials, seed, [&](const Field& f, const std::string& label) {
    const Field m = measure_of(chain, f);
    const double info = fisher(f, chain).value;
    const double info_bar = fisher_bar(f, chain).value;
    const double forward = weak_transport(m, pi, dg).value;
    const double reverse = weak_transport(pi, m, dg).value;
    std::vector<AuditRecord> recs;
    recs.push_back(with_witness(
        make_record(TheoremTag::cde_weak_information, label, forward, factor * info), f));
    recs.push_back(with_witness(make_record(TheoremTag::cde_weak_information_bar, label,
                                            forward, factor * info_bar), f));
    recs.push_back(with_witness(
        make_record(TheoremTag::cde_weak_reverse_bar, label, reverse, factor * info_bar), f));
    for (std::size_t r = 1; r < recs.size(); ++r) {
      if (std::isinf(recs[r].rhs)) recs[r].note = "Ibar(f) is infinite: f vanishes somewhere";
    }
    return recs;
  });
}

std::vector<AuditRecord> audit_coarse_suite(const MarkovChain& chain, double kappa_c,
                                            std::size_t trials, std::uint64_t seed,
                                            const AuditDistances* distances) {
  require_positive_constant(kappa_c, "kappa_c");
  AuditDistances own;
  if (distances == nullptr) {
    own = make_audit_distances(chain, false);
    distances = &own;
  }
  const DistanceMatrix& dg = distances->graph;
  require_matching(chain, dg);
  const double j = chain.laziness();
  const Field pi = stationary_field(chain);

  return over_densities(chain, trials, seed, [&](const Field& f, const std::string& label) {
    const Field m = measure_of(chain, f);
    const double info = fisher(f, chain).value;
    const double w = wasserstein_p(m, pi, dg, 1.0).value;
    double l1 = 0.0;
    for (std::size_t x = 0; x < chain.size(); ++x) {
      for (const auto& e : chain.neighbors(x)) {
        l1 += std::abs(f[x] - f[e.target]) * e.rate * chain.stationary(x);
      }
    }
    std::vector<AuditRecord> recs;
    recs.push_back(with_witness(make_record(TheoremTag::coarse_w1_information, label, w * w,
                                            info * (j - info / 8.0) / (kappa_c * kappa_c)),
                                f));
    recs.push_back(
        with_witness(make_record(TheoremTag::coarse_w1_l1, label, w, l1 / kappa_c), f));
    recs.push_back(with_witness(
        make_record(TheoremTag::fisher_upper_bound, label, info, fisher_ceiling(f, chain)), f));
    return recs;
  });
}

std::vector<AuditRecord> ti_implies_th_check(const MarkovChain& chain, double C,
                                             const DistanceMatrix& d,
                                             std::span<const double> lambda_grid,
                                             std::size_t trials, std::uint64_t seed) {
  require_positive_constant(C, "C");
  require_matching(chain, d);
  for (double l : lambda_grid) {
    if (!(l >= 0.0 && l <= 50.0)) {
      throw Error(ErrorCode::invalid_argument, "lambda values must lie in [0, 50]");
    }
  }
  const std::size_t n = chain.size();
  const Field pi = stationary_field(chain);

  std::vector<std::vector<AuditRecord>> mgf(trials);
  parallel_for(trials, [&](std::size_t i) {
    auto rng = make_stream(seed, 0x7117, i);
    const Field f = random_lipschitz(chain, d, rng);
    for (double l : lambda_grid) {
      double lhs = 0.0;
      for (std::size_t x = 0; x < n; ++x) lhs += std::exp(l * f[x]) * pi[x];
      std::ostringstream os;
      os << "lipschitz=" << i << " lambda=" << l;
      mgf[i].push_back(with_witness(
          make_record(TheoremTag::ti_th_mgf, os.str(), lhs, std::exp(l * l / (2.0 * C))), f));
    }
  });

  std::vector<AuditRecord> direct(trials);
  parallel_for(trials, [&](std::size_t i) {
    auto rng = make_stream(seed, 0x7118, i);
    const Field f = random_density(chain, rng, std::sqrt(kSigma2[i % 3]));
    const double w = wasserstein_p(measure_of(chain, f), pi, d, 1.0).value;
    std::ostringstream os;
    os << "density=" << i;
    direct[i] = with_witness(make_record(TheoremTag::ti_th_direct, os.str(), w * w,
                                         2.0 / C * entropy(f, chain).value),
                             f);
  });

  std::vector<AuditRecord> out;
  for (auto& s : mgf) std::move(s.begin(), s.end(), std::back_inserter(out));
  std::move(direct.begin(), direct.end(), std::back_inserter(out));
  return out;
}

std::vector<AuditRecord> weak_ti_th_check(const MarkovChain& chain, double C,
                                          std::size_t trials, std::uint64_t seed,
                                          const DistanceMatrix& d) {
  require_positive_constant(C, "C");
  require_matching(chain, d);
  const std::size_t n = chain.size();
  const double a = C / 2.0;
  const Field pi = stationary_field(chain);

  std::vector<AuditRecord> expo(trials);
  parallel_for(trials, [&](std::size_t i) {
    auto rng = make_stream(seed, 0x3EA7, i);
    const Field f = random_uniform_field(n, rng, -1.0, 1.0);
    const Field q = inf_convolution(f, d, 1.0);
    double lhs = 0.0;
    for (std::size_t x = 0; x < n; ++x) lhs += std::exp(a * q[x]) * pi[x];
    std::ostringstream os;
    os << "bounded=" << i;
    expo[i] = with_witness(make_record(TheoremTag::weak_ti_th_exponential, os.str(), lhs,
                                       std::exp(a * integrate(chain, f))),
                           f);
  });

  std::vector<AuditRecord> direct(trials);
  parallel_for(trials, [&](std::size_t i) {
    auto rng = make_stream(seed, 0x3EA8, i);
    const Field f = random_density(chain, rng, std::sqrt(kSigma2[i % 3]));
    const double w = weak_transport(pi, measure_of(chain, f), d).value;
    std::ostringstream os;
    os << "density=" << i;
    direct[i] = with_witness(make_record(TheoremTag::weak_ti_th_direct, os.str(), w,
                                         2.0 / C * entropy(f, chain).value),
                             f);
  });

  std::move(direct.begin(), direct.end(), std::back_inserter(expo));
  return expo;
}

std::vector<AuditRecord> diameter_bound(const MarkovChain& chain, double C,
                                        const DistanceMatrix& d) {
  require_positive_constant(C, "C");
  require_matching(chain, d);
  const std::size_t n = chain.size();
  const auto& labels = chain.labels();
  std::vector<AuditRecord> out;
  for (std::size_t x = 0; x < n; ++x) {
    Field f(n, 0.0);
    f[x] = 1.0 / chain.stationary(x);
    out.push_back(make_record(TheoremTag::fisher_upper_bound, "dirac x=" + labels[x],
                              fisher(f, chain).value, 4.0 * chain.laziness(x)));
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double bound =
          2.0 / C * (std::sqrt(chain.laziness(x)) + std::sqrt(chain.laziness(y)));
      out.push_back(make_record(TheoremTag::diameter, "pair " + labels[x] + "," + labels[y],
                                d(x, y), bound));
    }
  }
  return out;
}

std::vector<AuditRecord> diameter_cd_bound(const MarkovChain& chain, double kappa,
                                           const DistanceMatrix& d_graph) {
  require_positive_constant(kappa, "kappa");
  require_matching(chain, d_graph);
  const std::size_t n = chain.size();
  const auto& labels = chain.labels();
  std::vector<AuditRecord> out;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double jx = std::sqrt(chain.laziness(x));
      const double jy = std::sqrt(chain.laziness(y));
      out.push_back(make_record(TheoremTag::diameter_cd, "pair " + labels[x] + "," + labels[y],
                                kappa * d_graph(x, y), 2.0 * std::min(jx, jy) * (jx + jy)));
    }
  }
  return out;
}

double diameter_bound_ratio(const MarkovChain& chain, double C, const DistanceMatrix& d) {
  require_positive_constant(C, "C");
  require_matching(chain, d);
  const std::size_t n = chain.size();
  double best = kInf;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      best = std::min(best, 2.0 / C * (std::sqrt(chain.laziness(x)) +
                                       std::sqrt(chain.laziness(y))));
    }
  }
  const double diam = d.diameter();
  if (!(diam > 0.0)) throw Error(ErrorCode::invalid_argument, "distance has zero diameter");
  return best / diam;
}

namespace {

struct Partition {
  std::vector<std::size_t> c1;
  std::vector<std::size_t> c2;
  double mass1 = 0.0;
  double mass2 = 0.0;
  double gap = 0.0;
};

Partition check_partition(const MarkovChain& chain, const std::vector<std::size_t>& block1,
                          const std::vector<std::size_t>& block2, const DistanceMatrix& d) {
  const std::size_t n = chain.size();
  require_matching(chain, d);
  if (block1.empty() || block2.empty()) {
    throw Error(ErrorCode::bad_partition, "both blocks must carry positive mass");
  }
  std::vector<int> owner(n, 0);
  Partition p{block1, block2};
  for (int b = 1; b <= 2; ++b) {
    for (std::size_t x : b == 1 ? block1 : block2) {
      if (x >= n) throw Error(ErrorCode::bad_partition, "state index out of range");
      if (owner[x] != 0) throw Error(ErrorCode::bad_partition, "blocks overlap");
      owner[x] = b;
      (b == 1 ? p.mass1 : p.mass2) += chain.stationary(x);
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (owner[x] == 0 && chain.stationary(x) > 0.0) {
      throw Error(ErrorCode::bad_partition, "blocks do not cover the support of pi");
    }
  }
  p.gap = kInf;
  for (std::size_t x : block1) {
    for (std::size_t y : block2) p.gap = std::min(p.gap, d(x, y));
  }
  if (!(p.mass1 > 0.0) || !(p.mass2 > 0.0)) {
    throw Error(ErrorCode::bad_partition, "both blocks must carry positive mass");
  }
  if (!(p.gap > 0.0)) throw Error(ErrorCode::bad_partition, "blocks are not separated");
  return p;
}

}  // namespace

std::vector<BlowupPoint> t2_blowup_series(const MarkovChain& chain,
                                          const std::vector<std::size_t>& block1,
                                          const std::vector<std::size_t>& block2,
                                          std::span<const double> h_grid,
                                          const DistanceMatrix& d) {
  const Partition p = check_partition(chain, block1, block2, d);
  const double hmax = std::min(p.mass1, p.mass2);
  const std::size_t n = chain.size();
  const Field pi = stationary_field(chain);
  std::vector<BlowupPoint> out;
  for (double h : h_grid) {
    if (!(h > 0.0 && h < hmax)) {
      throw Error(ErrorCode::invalid_argument, "h must lie in (0, min(pi(C1), pi(C2)))");
    }
    Field f(n, 1.0);
    for (std::size_t x : p.c1) f[x] = 1.0 + h / p.mass1;
    for (std::size_t x : p.c2) f[x] = 1.0 - h / p.mass2;
    const double w = wasserstein_p(pi, measure_of(chain, f), d, 2.0).value;
    BlowupPoint pt;
    pt.h = h;
    pt.w2_squared = w * w;
    pt.entropy = entropy(f, chain).value;
    pt.ratio = pt.w2_squared / pt.entropy;
    out.push_back(pt);
  }
  return out;
}

std::vector<AuditRecord> t2_blowup_demo(const MarkovChain& chain,
                                        const std::vector<std::size_t>& block1,
                                        const std::vector<std::size_t>& block2,
                                        std::span<const double> h_grid,
                                        const DistanceMatrix& d) {
  for (std::size_t k = 1; k < h_grid.size(); ++k) {
    if (!(h_grid[k] < h_grid[k - 1])) {
      throw Error(ErrorCode::invalid_argument, "h grid must be strictly decreasing");
    }
  }
  const Partition p = check_partition(chain, block1, block2, d);
  const auto series = t2_blowup_series(chain, block1, block2, h_grid, d);
  const double floor = p.gap * p.gap * p.mass1 * p.mass2;
  std::vector<AuditRecord> out;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& pt = series[k];
    std::ostringstream os;
    os << "h=" << pt.h;
    auto rec = make_record(TheoremTag::t2_blowup, os.str(), floor, pt.ratio * pt.h);
    std::ostringstream note;
    note.precision(17);
    note << "R(h)=" << pt.ratio;
    rec.note = note.str();
    out.push_back(std::move(rec));
    if (k > 0) {
      std::ostringstream mono;
      mono << "monotone h=" << series[k - 1].h << "->" << pt.h;
      out.push_back(
          make_record(TheoremTag::t2_blowup, mono.str(), series[k - 1].ratio, pt.ratio));
    }
  }
  return out;
}

namespace {

struct SuiteName {
  Suite suite;
  const char* name;
};

constexpr SuiteName kSuiteNames[] = {
    {Suite::cd, "cd"},
    {Suite::cde, "cde"},
    {Suite::coarse, "coarse"},
    {Suite::commutation, "commutation"},
    {Suite::contraction, "contraction"},
    {Suite::hj, "hj"},
    {Suite::gamma_estimates, "gamma_estimates"},
    {Suite::fisher, "fisher"},
    {Suite::ti_th, "ti_th"},
    {Suite::weak_ti_th, "weak_ti_th"},
    {Suite::diameter, "diameter"},
    {Suite::blowup, "blowup"},
};

}  // namespace

const char* suite_name(Suite suite) noexcept {
  for (const auto& e : kSuiteNames) {
    if (e.suite == suite) return e.name;
  }
  return "unknown";
}

Suite parse_suite(std::string_view name) {
  for (const auto& e : kSuiteNames) {
    if (name == e.name) return e.suite;
  }
  throw Error(ErrorCode::invalid_argument, "unknown suite '" + std::string(name) + "'");
}

std::set<Suite> all_suites() {
  std::set<Suite> out;
  for (const auto& e : kSuiteNames) out.insert(e.suite);
  return out;
}

std::set<Suite> parse_suites(std::string_view list) {
  if (list == "all") return all_suites();
  std::set<Suite> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, end - start);
    if (item == "all") {
      const auto every = all_suites();
      out.insert(every.begin(), every.end());
    } else {
      out.insert(parse_suite(item));
    }
    start = end + 1;
  }
  return out;
}

std::vector<SuiteSummary> summarize(const std::vector<AuditRecord>& records,
                                    bool informational) {
  std::vector<SuiteSummary> out;
  for (const auto& rec : records) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SuiteSummary& s) { return s.tag == rec.tag; });
    if (it == out.end()) {
      SuiteSummary s;
      s.tag = rec.tag;
      s.worst_slack = kInf;
      s.tightest = rec;
      s.informational = informational;
      out.push_back(std::move(s));
      it = std::prev(out.end());
    }
    ++it->trials;
    if (!rec.pass) ++it->violations;
    if (rec.slack < it->worst_slack) {
      it->worst_slack = rec.slack;
      it->tightest = rec;
    }
  }
  for (auto& s : out) {
    const auto& t = s.tightest;
    s.tight = std::isfinite(t.slack) &&
              std::abs(t.slack) <= kViolationTolerance * std::max(1.0, std::abs(t.rhs));
  }
  return out;
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

constexpr std::size_t kCommutationFields = 50;
constexpr std::size_t kHjFunctions = 20;
constexpr std::size_t kWitnessesPerTag = 3;
constexpr double kCdeMargin = 1e-6;

}  // namespace

AuditReport run_full_audit(const MarkovChain& chain, const AuditConfig& config) {
  const std::size_t n = chain.size();
  const auto& s = config.suites;
  const auto has = [&](Suite x) { return s.count(x) > 0; };
  AuditReport report;
  report.chain_name = config.chain_name;
  report.states = n;

  const double j = chain.laziness();
  const bool need_kappa = has(Suite::cd) || has(Suite::commutation) || has(Suite::ti_th) ||
                          has(Suite::diameter);
  const bool need_kappa_e = has(Suite::cde) || has(Suite::commutation) ||
                            has(Suite::weak_ti_th);
  const bool need_kappa_c = has(Suite::coarse) || has(Suite::contraction) ||
                            has(Suite::ti_th) || has(Suite::diameter);

  AuditDistances dist = make_audit_distances(chain, false);

  double kappa = std::numeric_limits<double>::quiet_NaN();
  double kappa_e = kappa;
  double kappa_c = kappa;
  if (need_kappa) kappa = config.kappa ? *config.kappa : cd_curvature(chain).global_value;
  if (need_kappa_e) {
    kappa_e = config.kappa_e
                  ? *config.kappa_e
                  : cde_curvature_upper(chain, config.cde_starts, config.seed).global_value -
                        kCdeMargin;
  }
  if (need_kappa_c) {
    kappa_c = config.kappa_c ? *config.kappa_c : coarse_ricci(chain, dist.graph).global_value;
  }
  if (need_kappa) report.constants.emplace_back("kappa", kappa);
  if (need_kappa_e) report.constants.emplace_back("kappa_e", kappa_e);
  if (need_kappa_c) report.constants.emplace_back("kappa_c", kappa_c);

  const bool kappa_pos = kappa > 0.0 && std::isfinite(kappa);
  const bool kappa_e_pos = kappa_e > 0.0 && std::isfinite(kappa_e);
  const bool kappa_c_pos = kappa_c > 0.0 && std::isfinite(kappa_c);
  if (kappa_pos && (has(Suite::cd) || has(Suite::ti_th) || has(Suite::diameter))) {
    dist.gamma = d_gamma(chain);
  }

  // T1I constants: 2/kappa^2 on d_Gamma, and max(J/kappa^2, J/kappa_c^2) on d_g.
  double c_graph = 0.0;
  if (kappa_pos) c_graph = std::max(c_graph, kappa / std::sqrt(j));
  if (kappa_c_pos) c_graph = std::max(c_graph, kappa_c / std::sqrt(j));
  const double c_gamma = kappa_pos ? kappa / std::sqrt(2.0) : 0.0;
  const double c_weak = kappa_e_pos ? kappa_e / std::sqrt(2.0 * j) : 0.0;
  if (has(Suite::ti_th) || has(Suite::diameter)) {
    if (c_graph > 0.0) report.constants.emplace_back("t1i_dgraph", c_graph);
    if (c_gamma > 0.0) report.constants.emplace_back("t1i_dgamma", c_gamma);
  }
  if (has(Suite::weak_ti_th) && c_weak > 0.0) report.constants.emplace_back("t2i_weak", c_weak);

  std::vector<AuditRecord> records;
  std::vector<AuditRecord> informational;
  const auto append = [&](std::vector<AuditRecord> more) {
    std::move(more.begin(), more.end(), std::back_inserter(records));
  };
  const auto skip = [&](Suite x, const std::string& why) {
    report.skipped.push_back(std::string(suite_name(x)) + ": " + why);
  };
  const std::uint64_t seed = config.seed;
  const std::size_t trials = config.trials;
  const std::vector<double> t_grid = {0.1, 1.0, 10.0};

  if (has(Suite::cd)) {
    if (kappa_pos) {
      append(audit_cd_suite(chain, kappa, trials, seed, &dist));
      append(audit_cd_gamma_dual_suite(chain, kappa, trials, seed));
    } else {
      skip(Suite::cd, "kappa is not positive");
    }
  }
  if (has(Suite::cde)) {
    if (kappa_e_pos) append(audit_cde_suite(chain, kappa_e, trials, seed, &dist));
    else skip(Suite::cde, "kappa_e is not positive");
  }
  if (has(Suite::coarse)) {
    if (kappa_c_pos) append(audit_coarse_suite(chain, kappa_c, trials, seed, &dist));
    else skip(Suite::coarse, "kappa_c is not positive");
  }
  if (has(Suite::commutation)) {
    std::vector<Field> fields;
    std::vector<Field> positive;
    for (std::size_t i = 0; i < kCommutationFields; ++i) {
      auto rng = make_stream(seed, 0xC033, i);
      fields.push_back(random_uniform_field(n, rng, -1.0, 1.0));
      positive.push_back(random_positive_field(n, rng, 2.0));
    }
    if (std::isfinite(kappa)) {
      append(check_gamma_commutation(chain, kappa, fields, t_grid));
      informational = probe_classical_commutation(chain, kappa, fields, t_grid);
    } else {
      skip(Suite::commutation, "kappa is not finite, gamma form skipped");
    }
    if (std::isfinite(kappa_e)) {
      append(check_sqrt_commutation(chain, kappa_e, positive, t_grid));
    } else {
      skip(Suite::commutation, "kappa_e is not finite, sqrt form skipped");
    }
  }
  if (has(Suite::contraction)) {
    if (std::isfinite(kappa_c)) {
      append(contraction_check(chain, dist.graph, kappa_c, t_grid, trials, seed));
    } else {
      skip(Suite::contraction, "kappa_c is not finite");
    }
  }
  if (has(Suite::hj)) {
    const auto grid = linspace(0.05, 5.0, 20);
    const double diam = dist.graph.diameter();
    std::vector<std::vector<AuditRecord>> slots(kHjFunctions);
    parallel_for(kHjFunctions, [&](std::size_t i) {
      auto rng = make_stream(seed, 0x4A, i);
      const Field g = random_uniform_field(n, rng, -diam, diam);
      slots[i] = hj_check(g, dist.graph, grid);
      for (auto& r : slots[i]) r.instance = "g=" + std::to_string(i) + " " + r.instance;
    });
    for (auto& sl : slots) append(std::move(sl));
  }
  if (has(Suite::gamma_estimates)) {
    std::vector<std::vector<AuditRecord>> slots(trials);
    parallel_for(trials, [&](std::size_t i) {
      auto rng = make_stream(seed, 0x6E57, i);
      Field f = random_positive_field(n, rng, 2.0);
      if (i % 4 == 3) f[i % n] = 0.0;
      const Field g = random_uniform_field(n, rng, -1.0, 1.0);
      slots[i] = gamma_estimates_check(f, g, chain, dist.graph);
      for (auto& r : slots[i]) {
        r.instance = "pair=" + std::to_string(i);
        if (!r.pass) {
          r.witness = f;
          r.witness.insert(r.witness.end(), g.begin(), g.end());
        }
      }
    });
    for (auto& sl : slots) append(std::move(sl));
  }
  if (has(Suite::fisher)) {
    append(over_densities(chain, trials, seed, [&](const Field& f, const std::string& label) {
      const double info = fisher(f, chain).value;
      std::vector<AuditRecord> recs;
      recs.push_back(with_witness(
          make_record(TheoremTag::fisher_upper_bound, label, info, fisher_ceiling(f, chain)),
          f));
      const bool positive = std::all_of(f.begin(), f.end(), [](double v) { return v > 0.0; });
      if (positive) {
        recs.push_back(with_witness(make_record(TheoremTag::fisher_order_modified, label, info,
                                                fisher_modified(f, chain).value, 1e-10),
                                    f));
      }
      auto bar = make_record(TheoremTag::fisher_order_bar, label, info,
                             fisher_bar(f, chain).value, 1e-10);
      if (std::isinf(bar.rhs)) bar.note = "Ibar(f) is infinite: f vanishes somewhere";
      recs.push_back(with_witness(std::move(bar), f));
      return recs;
    }));
  }
  const std::vector<double> lambdas = {0.5, 1.0, 2.0, 5.0};
  if (has(Suite::ti_th)) {
    if (c_graph > 0.0) {
      append(ti_implies_th_check(chain, c_graph, dist.graph, lambdas, trials, seed));
    }
    if (c_gamma > 0.0 && dist.gamma) {
      append(ti_implies_th_check(chain, c_gamma, *dist.gamma, lambdas, trials, seed));
    }
    if (c_graph <= 0.0) skip(Suite::ti_th, "no positive T1I constant");
  }
  if (has(Suite::weak_ti_th)) {
    if (c_weak > 0.0) append(weak_ti_th_check(chain, c_weak, trials, seed, dist.graph));
    else skip(Suite::weak_ti_th, "kappa_e is not positive");
  }
  if (has(Suite::diameter)) {
    if (c_graph > 0.0) {
      append(diameter_bound(chain, c_graph, dist.graph));
      report.constants.emplace_back("diameter_ratio_dgraph",
                                    diameter_bound_ratio(chain, c_graph, dist.graph));
    }
    if (c_gamma > 0.0 && dist.gamma) append(diameter_bound(chain, c_gamma, *dist.gamma));
    if (kappa_pos) append(diameter_cd_bound(chain, kappa, dist.graph));
    if (c_graph <= 0.0) skip(Suite::diameter, "no positive T1I constant");
  }
  if (has(Suite::blowup)) {
    std::vector<std::size_t> c1 = {0};
    std::vector<std::size_t> c2;
    for (std::size_t x = 1; x < n; ++x) c2.push_back(x);
    const double hmax = std::min(chain.stationary(0), 1.0 - chain.stationary(0));
    std::vector<double> h_grid;
    for (int k = 3; k <= 10; ++k) h_grid.push_back(hmax * std::ldexp(1.0, -k));
    append(t2_blowup_demo(chain, c1, c2, h_grid, dist.graph));
  }

  report.suites = summarize(records);
  auto info_summary = summarize(informational, true);
  std::move(info_summary.begin(), info_summary.end(), std::back_inserter(report.suites));

  std::map<TheoremTag, std::size_t> shown;
  for (const auto& r : records) {
    if (r.pass) continue;
    ++report.total_violations;
    if (shown[r.tag]++ < kWitnessesPerTag) report.violations.push_back(r);
  }

  nlohmann::json meta;
  meta["version"] = CURVGRAPH_VERSION;
  nlohmann::json suites = nlohmann::json::array();
  for (Suite x : s) suites.push_back(suite_name(x));
  nlohmann::json cfg;
  cfg["suites"] = suites;
  cfg["trials"] = config.trials;
  cfg["seed"] = config.seed;
  cfg["cde_starts"] = config.cde_starts;
  cfg["kappa"] = config.kappa ? json_number(*config.kappa) : nlohmann::json(nullptr);
  cfg["kappa_e"] = config.kappa_e ? json_number(*config.kappa_e) : nlohmann::json(nullptr);
  cfg["kappa_c"] = config.kappa_c ? json_number(*config.kappa_c) : nlohmann::json(nullptr);
  meta["config"] = cfg;
  meta["conventions"] = {
      {"t1i", "T1I inequalities are checked in their displayed form: 2/kappa^2 on d_Gamma, "
              "J/kappa^2 on d_g; the 1/C^2 normalization gives C = kappa/sqrt2 resp. "
              "kappa/sqrt(J)"},
      {"t2i_weak", "weak T2I checked with 2J/kappa_e^2; C = kappa_e/sqrt(2J)"},
      {"kappa_e", "multi-start upper bound on the CDE' constant minus 1e-6"},
      {"weak_orientation", "W~2(nu|mu) mixes kernels leaving mu into nu"},
      {"classical_commutation", "reported only, never counted as a violation"},
  };
  report.meta = meta;
  return report;
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json out;
  out["chain"] = report.chain_name;
  out["states"] = report.states;
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& s : report.suites) {
    nlohmann::json js;
    js["theorem_tag"] = theorem_tag_name(s.tag);
    js["trials"] = s.trials;
    js["violations"] = s.violations;
    js["worst_slack"] = json_number(s.worst_slack);
    js["tightest"] = to_json(s.tightest);
    js["tight"] = s.tight;
    js["informational"] = s.informational;
    suites.push_back(std::move(js));
  }
  out["suites"] = std::move(suites);
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [name, value] : report.constants) constants[name] = json_number(value);
  out["constants"] = std::move(constants);
  out["skipped"] = report.skipped;
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& r : report.violations) violations.push_back(to_json(r));
  out["violations"] = std::move(violations);
  out["total_violations"] = report.total_violations;
  out["meta"] = report.meta;
  return out;
}

}  // namespace curvgraph
