#include "curvgraph/operators.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "curvgraph/error.hpp"

namespace curvgraph {
namespace {

void require_size(const MarkovChain& chain, std::span<const double> f) {
  if (f.size() != chain.size()) throw Error(ErrorCode::dimension_mismatch, "field size mismatch");
}

void require_positive_near(const MarkovChain& chain, std::span<const double> f, std::size_t x,
                           double floor) {
  if (!(f[x] >= floor)) {
    throw Error(ErrorCode::non_positive_field, "field below positivity floor at state " +
                                                   std::to_string(x));
  }
  for (const Transition& t : chain.neighbors(x)) {
    if (!(f[t.target] >= floor)) {
      throw Error(ErrorCode::non_positive_field,
                  "field below positivity floor at state " + std::to_string(t.target));
    }
  }
}

}  // namespace

double generator_at(const MarkovChain& chain, std::span<const double> f, std::size_t x) {
  double s = 0.0;
  for (const Transition& t : chain.neighbors(x)) s += (f[t.target] - f[x]) * t.rate;
  return s;
}

double gamma_at(const MarkovChain& chain, std::span<const double> f, std::span<const double> g,
                std::size_t x) {
  double s = 0.0;
  for (const Transition& t : chain.neighbors(x)) {
    s += (f[t.target] - f[x]) * (g[t.target] - g[x]) * t.rate;
  }
  return 0.5 * s;
}

double gamma2_at(const MarkovChain& chain, std::span<const double> f, std::size_t x) {
  const double gx = gamma_at(chain, f, f, x);
  const double lx = generator_at(chain, f, x);
  double half_l_gamma = 0.0;
  double cross = 0.0;
  for (const Transition& t : chain.neighbors(x)) {
    const std::size_t y = t.target;
    half_l_gamma += (gamma_at(chain, f, f, y) - gx) * t.rate;
    cross += (f[y] - f[x]) * (generator_at(chain, f, y) - lx) * t.rate;
  }
  return 0.5 * half_l_gamma - 0.5 * cross;
}

double gamma2_tilde_at(const MarkovChain& chain, std::span<const double> f, std::size_t x,
                       double floor) {
  require_positive_near(chain, f, x, floor);
  const double rx = gamma_at(chain, f, f, x) / f[x];
  double cross = 0.0;
  for (const Transition& t : chain.neighbors(x)) {
    const std::size_t y = t.target;
    cross += (f[y] - f[x]) * (gamma_at(chain, f, f, y) / f[y] - rx) * t.rate;
  }
  return gamma2_at(chain, f, x) - 0.5 * cross;
}

Field generator_apply(const MarkovChain& chain, std::span<const double> f) {
  require_size(chain, f);
  Field out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = generator_at(chain, f, x);
  return out;
}

Field gamma(const MarkovChain& chain, std::span<const double> f, std::span<const double> g) {
  require_size(chain, f);
  require_size(chain, g);
  Field out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = gamma_at(chain, f, g, x);
  return out;
}

Field gamma(const MarkovChain& chain, std::span<const double> f) { return gamma(chain, f, f); }

Field gamma2(const MarkovChain& chain, std::span<const double> f) {
  require_size(chain, f);
  const Field g = gamma(chain, f);
  const Field lf = generator_apply(chain, f);
  const Field lg = generator_apply(chain, g);
  const Field cross = gamma(chain, f, lf);
  Field out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = 0.5 * lg[x] - cross[x];
  return out;
}

Field gamma2_tilde(const MarkovChain& chain, std::span<const double> f, double floor) {
  require_size(chain, f);
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (!(f[x] >= floor)) {
      throw Error(ErrorCode::non_positive_field,
                  "field below positivity floor at state " + std::to_string(x));
    }
  }
  const Field g = gamma(chain, f);
  Field ratio(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) ratio[x] = g[x] / f[x];
  const Field cross = gamma(chain, f, ratio);
  Field out = gamma2(chain, f);
  for (std::size_t x = 0; x < f.size(); ++x) out[x] -= cross[x];
  return out;
}

std::vector<std::size_t> ball(const MarkovChain& chain, std::size_t x, int radius) {
  std::unordered_map<std::size_t, int> dist{{x, 0}};
  std::deque<std::size_t> queue{x};
  std::vector<std::pair<int, std::size_t>> found{{0, x}};
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    const int du = dist[u];
    if (du == radius) continue;
    for (const Transition& t : chain.neighbors(u)) {
      if (dist.emplace(t.target, du + 1).second) {
        found.push_back({du + 1, t.target});
        queue.push_back(t.target);
      }
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<std::size_t> out;
  out.reserve(found.size());
  for (const auto& [d, v] : found) out.push_back(v);
  return out;
}

Field LocalForms::embed(const Eigen::VectorXd& local, std::size_t n) const {
  Field f(n, 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) f[support[i]] = local(static_cast<Eigen::Index>(i));
  return f;
}

Eigen::VectorXd LocalForms::restrict(std::span<const double> f) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[support[i]];
  return v;
}

LocalForms local_forms(const MarkovChain& chain, std::size_t x) {
  LocalForms out;
  out.center = x;
  out.support = ball(chain, x, 2);
  const auto m = static_cast<Eigen::Index>(out.support.size());
  std::unordered_map<std::size_t, Eigen::Index> local;
  for (Eigen::Index i = 0; i < m; ++i) local[out.support[static_cast<std::size_t>(i)]] = i;

  // Gamma(f)(y) = sum_z K(y,z)/2 (f_z - f_y)^2 as a matrix over the support.
  auto add_gamma = [&](Eigen::MatrixXd& target, std::size_t y, double weight) {
    const Eigen::Index iy = local.at(y);
    for (const Transition& t : chain.neighbors(y)) {
      const Eigen::Index iz = local.at(t.target);
      const double w = 0.5 * t.rate * weight;
      target(iy, iy) += w;
      target(iz, iz) += w;
      target(iy, iz) -= w;
      target(iz, iy) -= w;
    }
  };
  // Lf(y) = sum_z K(y,z) (f_z - f_y) as a coefficient vector.
  auto generator_row = [&](std::size_t y) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    const Eigen::Index iy = local.at(y);
    for (const Transition& t : chain.neighbors(y)) {
      v(local.at(t.target)) += t.rate;
      v(iy) -= t.rate;
    }
    return v;
  };

  out.gamma_form = Eigen::MatrixXd::Zero(m, m);
  add_gamma(out.gamma_form, x, 1.0);

  // Gamma2(f)(x) = 1/2 sum_y K(x,y) [Gamma(f)(y) - Gamma(f)(x)]
  //              - 1/2 sum_y K(x,y) (f_y - f_x)(Lf(y) - Lf(x))
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  const Eigen::VectorXd lx = generator_row(x);
  const Eigen::Index ix = local.at(x);
  double total = 0.0;
  for (const Transition& t : chain.neighbors(x)) {
    const std::size_t y = t.target;
    add_gamma(b, y, 0.5 * t.rate);
    total += t.rate;
    Eigen::VectorXd diff = Eigen::VectorXd::Zero(m);
    diff(local.at(y)) += 1.0;
    diff(ix) -= 1.0;
    const Eigen::VectorXd ldiff = generator_row(y) - lx;
    const Eigen::MatrixXd outer = diff * ldiff.transpose();
    b -= 0.25 * t.rate * (outer + outer.transpose());
  }
  b -= 0.5 * total * out.gamma_form;
  out.gamma2_form = 0.5 * (b + b.transpose());
  return out;
}

}  // namespace curvgraph
