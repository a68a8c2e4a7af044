#include "curvgraph/curvgraph.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvgraph/audit.hpp"
#include "curvgraph/chain_io.hpp"
#include "curvgraph/curvature.hpp"
#include "curvgraph/error.hpp"
#include "curvgraph/functionals.hpp"
#include "curvgraph/markov_chain.hpp"
#include "curvgraph/parallel.hpp"
#include "curvgraph/report.hpp"
#include "curvgraph/transport.hpp"

struct cg_chain {
  curvgraph::MarkovChain chain;
};

namespace {

using curvgraph::ErrorCode;
using nlohmann::json;

thread_local std::string g_last_error;

cg_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return CG_INVALID_ARGUMENT;
    case ErrorCode::row_sum_violation: return CG_ROW_SUM_VIOLATION;
    case ErrorCode::not_irreducible: return CG_NOT_IRREDUCIBLE;
    case ErrorCode::not_reversible: return CG_NOT_REVERSIBLE;
    case ErrorCode::unsupported_size: return CG_UNSUPPORTED_SIZE;
    case ErrorCode::non_positive_field: return CG_NON_POSITIVE_FIELD;
    case ErrorCode::negative_density: return CG_NEGATIVE_DENSITY;
    case ErrorCode::dimension_mismatch: return CG_DIMENSION_MISMATCH;
    case ErrorCode::non_finite_distance: return CG_NON_FINITE_DISTANCE;
    case ErrorCode::bad_partition: return CG_BAD_PARTITION;
    case ErrorCode::truncation_failure: return CG_TRUNCATION_FAILURE;
    case ErrorCode::degenerate_form: return CG_DEGENERATE_FORM;
    case ErrorCode::lp_infeasible: return CG_LP_INFEASIBLE;
    case ErrorCode::unbounded: return CG_UNBOUNDED;
    case ErrorCode::infeasible_mixture: return CG_INFEASIBLE_MIXTURE;
    case ErrorCode::io_error: return CG_IO_ERROR;
  }
  return CG_INTERNAL;
}

template <typename Body>
cg_status guarded(Body body) {
  try {
    body();
    g_last_error.clear();
    return CG_OK;
  } catch (const curvgraph::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return CG_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CG_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return CG_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw curvgraph::Error(ErrorCode::invalid_argument, what);
}

char* duplicate(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_options(const char* text) {
  if (text == nullptr || *text == '\0') return json::object();
  json doc = json::parse(text);
  require(doc.is_object(), "options must be a JSON object");
  return doc;
}

std::vector<std::string> what_list(const json& opts) {
  std::vector<std::string> out;
  if (!opts.contains("what")) return {"cd", "cde", "coarse"};
  const json& w = opts.at("what");
  if (w.is_string()) {
    const std::string s = w.get<std::string>();
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t end = std::min(s.find(',', start), s.size());
      out.push_back(s.substr(start, end - start));
      start = end + 1;
    }
  } else {
    out = w.get<std::vector<std::string>>();
  }
  for (const auto& item : out) {
    require(item == "cd" || item == "cde" || item == "coarse" || item == "dgamma" ||
                item == "functionals",
            "unknown analysis in 'what'");
  }
  return out;
}

curvgraph::DistanceMatrix distance_for(const curvgraph::MarkovChain& chain,
                                       const std::string& kind, double tol) {
  if (kind == "graph") return curvgraph::graph_distance(chain);
  if (kind == "gamma") return curvgraph::d_gamma(chain, tol);
  throw curvgraph::Error(ErrorCode::invalid_argument, "distance must be 'graph' or 'gamma'");
}

curvgraph::Field measure_from(const curvgraph::MarkovChain& chain, const json& spec) {
  const std::size_t n = chain.size();
  if (spec.is_array()) {
    auto out = spec.get<curvgraph::Field>();
    if (out.size() != n) {
      throw curvgraph::Error(ErrorCode::dimension_mismatch, "measure has the wrong length");
    }
    return out;
  }
  const std::string s = spec.get<std::string>();
  if (s == "pi") return {chain.stationary().begin(), chain.stationary().end()};
  if (s.rfind("dirac:", 0) == 0) {
    curvgraph::Field out(n, 0.0);
    out[chain.index_of(s.substr(6))] = 1.0;
    return out;
  }
  throw curvgraph::Error(ErrorCode::invalid_argument,
                         "measure must be an array, 'pi' or 'dirac:<label>'");
}

json functionals_json(const curvgraph::MarkovChain& chain, const json& opts) {
  using namespace curvgraph;
  json out;
  const auto lazy = laziness(chain);
  out["laziness"] = lazy.per_state;
  out["J"] = lazy.global;
  if (!opts.contains("density")) return out;
  const auto f = opts.at("density").get<Field>();
  require_density(f, chain);
  out["density"] = f;
  out["entropy"] = json_number(entropy(f, chain).value);
  out["fisher"] = json_number(fisher(f, chain).value);
  bool positive = true;
  for (double v : f) positive = positive && v > 0.0;
  if (positive) out["fisher_modified"] = json_number(fisher_modified(f, chain).value);
  out["fisher_bar"] = json_number(fisher_bar(f, chain).value);
  out["fisher_ceiling"] = json_number(fisher_ceiling(f, chain));
  out["dirichlet_energy"] = json_number(dirichlet_energy(f, chain));
  return out;
}

}  // namespace

extern "C" {

const char* cg_last_error(void) { return g_last_error.c_str(); }

const char* cg_status_name(cg_status status) {
  switch (status) {
    case CG_OK: return "Ok";
    case CG_INTERNAL: return "Internal";
    default: break;
  }
  if (status > CG_OK && status < CG_INTERNAL) {
    return curvgraph::error_code_name(static_cast<ErrorCode>(status - 1));
  }
  return "Unknown";
}

const char* cg_version(void) { return CURVGRAPH_VERSION; }

void cg_set_threads(size_t threads) { curvgraph::set_thread_count(threads); }

cg_status cg_chain_from_triplets(size_t n, const char* const* labels, const size_t* src,
                                 const size_t* dst, const double* rate, size_t count,
                                 cg_chain** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(count == 0 || (src && dst && rate), "triplet arrays are null");
    std::vector<std::string> names(n);
    for (size_t i = 0; i < n; ++i) {
      names[i] = labels ? std::string(labels[i]) : std::to_string(i);
    }
    std::vector<curvgraph::Triplet> entries(count);
    for (size_t k = 0; k < count; ++k) entries[k] = {src[k], dst[k], rate[k]};
    *out = new cg_chain{curvgraph::build_chain(std::move(names), entries)};
  });
}

cg_status cg_chain_standard(const char* name, size_t n, cg_chain** out) {
  return guarded([&] {
    require(out != nullptr && name != nullptr, "null argument");
    *out = new cg_chain{
        curvgraph::standard_chain(curvgraph::parse_standard_chain(name), n)};
  });
}

cg_status cg_chain_load(const char* path, int complete_diagonal, cg_chain** out) {
  return guarded([&] {
    require(out != nullptr && path != nullptr, "null argument");
    *out = new cg_chain{curvgraph::load_chain(path, complete_diagonal != 0)};
  });
}

cg_status cg_chain_save(const cg_chain* chain, const char* path, const char* meta_json) {
  return guarded([&] {
    require(chain != nullptr && path != nullptr, "null argument");
    curvgraph::save_chain(chain->chain, path, parse_options(meta_json));
  });
}

void cg_chain_free(cg_chain* chain) { delete chain; }

size_t cg_chain_size(const cg_chain* chain) { return chain ? chain->chain.size() : 0; }

const char* cg_chain_label(const cg_chain* chain, size_t i) {
  if (chain == nullptr || i >= chain->chain.size()) return nullptr;
  return chain->chain.labels()[i].c_str();
}

cg_status cg_chain_stationary(const cg_chain* chain, double* out) {
  return guarded([&] {
    require(chain != nullptr && out != nullptr, "null argument");
    const auto pi = chain->chain.stationary();
    std::copy(pi.begin(), pi.end(), out);
  });
}

cg_status cg_chain_laziness(const cg_chain* chain, double* out) {
  return guarded([&] {
    require(chain != nullptr && out != nullptr, "null argument");
    const auto lazy = curvgraph::laziness(chain->chain);
    std::copy(lazy.per_state.begin(), lazy.per_state.end(), out);
  });
}

cg_status cg_cd_curvature(const cg_chain* chain, double* out) {
  return guarded([&] {
    require(chain != nullptr && out != nullptr, "null argument");
    *out = curvgraph::cd_curvature(chain->chain).global_value;
  });
}

cg_status cg_cde_curvature_upper(const cg_chain* chain, size_t starts, uint64_t seed,
                                 double* out) {
  return guarded([&] {
    require(chain != nullptr && out != nullptr, "null argument");
    *out = curvgraph::cde_curvature_upper(chain->chain, starts, seed).global_value;
  });
}

cg_status cg_coarse_ricci(const cg_chain* chain, double* out) {
  return guarded([&] {
    require(chain != nullptr && out != nullptr, "null argument");
    *out = curvgraph::coarse_ricci(chain->chain, curvgraph::graph_distance(chain->chain))
               .global_value;
  });
}

cg_status cg_distance(const cg_chain* chain, cg_distance_kind kind, double* out) {
  return guarded([&] {
    require(chain != nullptr && out != nullptr, "null argument");
    require(kind == CG_DISTANCE_GRAPH || kind == CG_DISTANCE_GAMMA, "unknown distance kind");
    const auto d = kind == CG_DISTANCE_GRAPH ? curvgraph::graph_distance(chain->chain)
                                             : curvgraph::d_gamma(chain->chain);
    std::copy(d.values().begin(), d.values().end(), out);
  });
}

cg_status cg_analyze_json(const cg_chain* chain, const char* options_json, char** out) {
  return guarded([&] {
    using namespace curvgraph;
    require(chain != nullptr && out != nullptr, "null argument");
    const json opts = parse_options(options_json);
    const MarkovChain& c = chain->chain;
    const auto what = what_list(opts);
    const double tol = opts.value("tol", 1e-7);
    json doc;
    doc["states"] = c.labels();
    doc["stationary"] = std::vector<double>(c.stationary().begin(), c.stationary().end());
    for (const auto& item : what) {
      if (item == "cd") {
        doc["cd"] = to_json(cd_curvature(c), c);
      } else if (item == "cde") {
        CdeOptions co;
        co.starts = opts.value("starts", std::size_t{64});
        co.seed = opts.value("seed", std::uint64_t{0});
        doc["cde"] = to_json(cde_curvature_upper(c, co), c);
      } else if (item == "coarse") {
        const auto d = distance_for(c, opts.value("distance", std::string("graph")), tol);
        const std::string pairs = opts.value("pairs", std::string("all"));
        require(pairs == "all" || pairs == "edges", "pairs must be 'all' or 'edges'");
        doc["coarse"] =
            to_json(coarse_ricci(c, d, pairs == "all" ? PairSet::all : PairSet::edges_only), c);
      } else if (item == "dgamma") {
        doc["dgamma"] = to_json(d_gamma(c, tol), c);
      } else {
        doc["functionals"] = functionals_json(c, opts);
      }
    }
    doc["meta"] = {{"version", CURVGRAPH_VERSION}, {"config", opts}};
    *out = duplicate(doc.dump(2));
  });
}

cg_status cg_audit_json(const cg_chain* chain, const char* config_json, char** out,
                        size_t* violations) {
  return guarded([&] {
    using namespace curvgraph;
    require(chain != nullptr && out != nullptr, "null argument");
    const json opts = parse_options(config_json);
    AuditConfig cfg;
    if (opts.contains("suites")) {
      const json& s = opts.at("suites");
      if (s.is_string()) {
        cfg.suites = parse_suites(s.get<std::string>());
      } else {
        cfg.suites.clear();
        for (const auto& item : s) cfg.suites.insert(parse_suite(item.get<std::string>()));
      }
    }
    cfg.trials = opts.value("trials", cfg.trials);
    cfg.seed = opts.value("seed", cfg.seed);
    cfg.cde_starts = opts.value("cde_starts", cfg.cde_starts);
    if (opts.contains("kappa")) cfg.kappa = opts.at("kappa").get<double>();
    if (opts.contains("kappa_e")) cfg.kappa_e = opts.at("kappa_e").get<double>();
    if (opts.contains("kappa_c")) cfg.kappa_c = opts.at("kappa_c").get<double>();
    cfg.chain_name = opts.value("chain_name", std::string());
    const AuditReport report = run_full_audit(chain->chain, cfg);
    if (violations) *violations = report.total_violations;
    *out = duplicate(to_json(report).dump(2));
  });
}

cg_status cg_transport_json(const cg_chain* chain, const char* request_json, char** out) {
  return guarded([&] {
    using namespace curvgraph;
    require(chain != nullptr && out != nullptr, "null argument");
    const json req = parse_options(request_json);
    const MarkovChain& c = chain->chain;
    require(req.contains("mu") && req.contains("nu"), "request needs 'mu' and 'nu'");
    const Field mu = measure_from(c, req.at("mu"));
    const Field nu = measure_from(c, req.at("nu"));
    const std::string cost = req.value("cost", std::string("w1"));
    const std::string kind = req.value("distance", std::string("graph"));
    const auto d = distance_for(c, kind, req.value("tol", 1e-7));
    json doc;
    doc["cost"] = cost;
    doc["distance"] = kind;
    doc["states"] = c.labels();
    if (cost == "w1" || cost == "w2") {
      const auto r = wasserstein_p(mu, nu, d, cost == "w1" ? 1.0 : 2.0);
      doc["value"] = json_number(r.value);
      doc["plan"] = to_json(r.plan);
      if (!r.potential.empty()) doc["potential"] = r.potential;
    } else if (cost == "weak") {
      const auto r = weak_transport(nu, mu, d);
      doc["value_squared"] = json_number(r.value);
      doc["gap"] = json_number(r.gap);
      doc["plan"] = to_json(r.plan);
      doc["dual_potential"] = r.dual_potential;
      doc["dual_value"] = json_number(weak_dual_objective(nu, mu, d, r.dual_potential));
    } else {
      throw Error(ErrorCode::invalid_argument, "cost must be 'w1', 'w2' or 'weak'");
    }
    doc["meta"] = {{"version", CURVGRAPH_VERSION}, {"request", req}};
    *out = duplicate(doc.dump(2));
  });
}

void cg_string_free(char* s) { delete[] s; }

}  // extern "C"
