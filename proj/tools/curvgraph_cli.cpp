#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvgraph/curvgraph.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

int exit_code(cg_status status) {
  switch (status) {
    case CG_OK: return kExitPass;
    case CG_IO_ERROR: return kExitIo;
    case CG_TRUNCATION_FAILURE:
    case CG_DEGENERATE_FORM:
    case CG_LP_INFEASIBLE:
    case CG_UNBOUNDED:
    case CG_INFEASIBLE_MIXTURE:
    case CG_INTERNAL: return kExitSolver;
    default: return kExitValidation;
  }
}

struct Failure {
  cg_status status;
};

void check(cg_status status) {
  if (status != CG_OK) throw Failure{status};
}

struct ChainHandle {
  cg_chain* ptr = nullptr;
  ChainHandle() = default;
  ChainHandle(const ChainHandle&) = delete;
  ChainHandle& operator=(const ChainHandle&) = delete;
  ~ChainHandle() { cg_chain_free(ptr); }
};

struct OwnedString {
  char* ptr = nullptr;
  OwnedString() = default;
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  ~OwnedString() { cg_string_free(ptr); }
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    throw Failure{CG_IO_ERROR};
  }
  out << text << '\n';
  if (!out) throw Failure{CG_IO_ERROR};
}

void load(ChainHandle& h, const std::string& path, bool complete_diagonal) {
  check(cg_chain_load(path.c_str(), complete_diagonal ? 1 : 0, &h.ptr));
}

nlohmann::json parse_list(const std::string& text) {
  nlohmann::json out = nlohmann::json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      std::cerr << "error: '" << item << "' is not a number\n";
      throw Failure{CG_INVALID_ARGUMENT};
    }
    out.push_back(v);
  }
  return out;
}

nlohmann::json measure_spec(const std::string& text) {
  if (text == "pi" || text.rfind("dirac:", 0) == 0) return text;
  return parse_list(text);
}

void write_distance_csv(const ChainHandle& h, cg_distance_kind kind, const std::string& path) {
  const std::size_t n = cg_chain_size(h.ptr);
  std::vector<double> d(n * n);
  check(cg_distance(h.ptr, kind, d.data()));
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << cg_chain_label(h.ptr, i);
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << d[i * n + j];
    if (i + 1 < n) os << '\n';
  }
  write_output(path, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature and functional-inequality toolkit for finite Markov chains"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(cg_version()));
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: CURVGRAPH_THREADS or all cores)");

  std::string output;
  bool complete_diagonal = false;

  auto* gen = app.add_subcommand("gen", "Write a standard chain to a JSON file");
  std::string gen_name;
  std::size_t gen_n = 1;
  gen->add_option("name", gen_name, "two_point, hypercube, cycle or complete")->required();
  gen->add_option("--n", gen_n, "Size parameter (hypercube dimension or number of states)");
  gen->add_option("-o,--output", output, "Output chain file")->required();

  auto* analyze = app.add_subcommand("analyze", "Curvatures, distances and functionals");
  std::string chain_path;
  std::string what = "cd,cde,coarse";
  std::size_t starts = 64;
  std::uint64_t seed = 0;
  std::string pairs = "all";
  std::string distance = "graph";
  double tol = 1e-7;
  std::string density;
  std::string csv_path;
  analyze->add_option("chain", chain_path, "Chain file (.json or .csv)")->required();
  analyze->add_option("--what", what, "Comma list of cd, cde, coarse, dgamma, functionals");
  analyze->add_option("--starts", starts, "Deterministic and random starts for the CDE' search");
  analyze->add_option("--seed", seed, "Seed for randomized searches");
  analyze->add_option("--pairs", pairs, "Coarse Ricci pairs: all or edges")
      ->check(CLI::IsMember({"all", "edges"}));
  analyze->add_option("--distance", distance, "Distance for coarse Ricci and --csv: graph or gamma")
      ->check(CLI::IsMember({"graph", "gamma"}));
  analyze->add_option("--tol", tol, "Tolerance of the Gamma-distance solver");
  analyze->add_option("--density", density, "Comma list density for the functionals");
  analyze->add_option("--csv", csv_path, "Also write the distance matrix as CSV");
  analyze->add_flag("--complete-diagonal", complete_diagonal,
                    "Top up deficient CSV rows on the diagonal");
  analyze->add_option("-o,--output", output, "Report path (default: stdout)");

  auto* audit = app.add_subcommand("audit", "Certify the functional inequalities");
  std::string suites = "all";
  std::size_t trials = 200;
  std::size_t cde_starts = 64;
  std::optional<double> kappa;
  std::optional<double> kappa_e;
  std::optional<double> kappa_c;
  audit->add_option("chain", chain_path, "Chain file (.json or .csv)")->required();
  audit->add_option("--suites", suites, "all or a comma list of suites");
  audit->add_option("--trials", trials, "Random instances per suite");
  audit->add_option("--seed", seed, "Seed of the random instances");
  audit->add_option("--cde-starts", cde_starts, "Starts for the CDE' search");
  audit->add_option("--kappa", kappa, "Override the CD constant");
  audit->add_option("--kappa-e", kappa_e, "Override the CDE' constant");
  audit->add_option("--kappa-c", kappa_c, "Override the coarse Ricci constant");
  audit->add_flag("--complete-diagonal", complete_diagonal,
                  "Top up deficient CSV rows on the diagonal");
  audit->add_option("-o,--output", output, "Report path (default: stdout)");

  auto* transport = app.add_subcommand("transport", "Transport costs between two measures");
  std::string mu;
  std::string nu;
  std::string cost = "w1";
  transport->add_option("chain", chain_path, "Chain file (.json or .csv)")->required();
  transport->add_option("--mu", mu, "Comma list, pi or dirac:<label>")->required();
  transport->add_option("--nu", nu, "Comma list, pi or dirac:<label>")->required();
  transport->add_option("--cost", cost, "w1, w2 or weak")->check(CLI::IsMember({"w1", "w2", "weak"}));
  transport->add_option("--distance", distance, "graph or gamma")
      ->check(CLI::IsMember({"graph", "gamma"}));
  transport->add_option("--tol", tol, "Tolerance of the Gamma-distance solver");
  transport->add_flag("--complete-diagonal", complete_diagonal,
                      "Top up deficient CSV rows on the diagonal");
  transport->add_option("-o,--output", output, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitValidation;
  }

  cg_set_threads(threads);
  try {
    if (*gen) {
      ChainHandle h;
      check(cg_chain_standard(gen_name.c_str(), gen_n, &h.ptr));
      const nlohmann::json meta = {{"generator", gen_name}, {"n", gen_n}};
      check(cg_chain_save(h.ptr, output.c_str(), meta.dump().c_str()));
      return kExitPass;
    }
    if (*analyze) {
      ChainHandle h;
      load(h, chain_path, complete_diagonal);
      nlohmann::json opts = {{"what", what}, {"starts", starts}, {"seed", seed},
                             {"pairs", pairs}, {"distance", distance}, {"tol", tol}};
      if (!density.empty()) opts["density"] = parse_list(density);
      OwnedString report;
      check(cg_analyze_json(h.ptr, opts.dump().c_str(), &report.ptr));
      write_output(output, report.ptr);
      if (!csv_path.empty()) {
        write_distance_csv(h, distance == "gamma" ? CG_DISTANCE_GAMMA : CG_DISTANCE_GRAPH,
                           csv_path);
      }
      return kExitPass;
    }
    if (*audit) {
      ChainHandle h;
      load(h, chain_path, complete_diagonal);
      nlohmann::json cfg = {{"suites", suites}, {"trials", trials}, {"seed", seed},
                            {"cde_starts", cde_starts},
                            {"chain_name", std::filesystem::path(chain_path).stem().string()}};
      if (kappa) cfg["kappa"] = *kappa;
      if (kappa_e) cfg["kappa_e"] = *kappa_e;
      if (kappa_c) cfg["kappa_c"] = *kappa_c;
      OwnedString report;
      std::size_t violations = 0;
      check(cg_audit_json(h.ptr, cfg.dump().c_str(), &report.ptr, &violations));
      write_output(output, report.ptr);
      if (violations > 0) {
        std::cerr << violations << " violation(s)\n";
        return kExitViolation;
      }
      return kExitPass;
    }
    if (*transport) {
      ChainHandle h;
      load(h, chain_path, complete_diagonal);
      const nlohmann::json req = {{"mu", measure_spec(mu)}, {"nu", measure_spec(nu)},
                                  {"cost", cost}, {"distance", distance}, {"tol", tol}};
      OwnedString report;
      check(cg_transport_json(h.ptr, req.dump().c_str(), &report.ptr));
      write_output(output, report.ptr);
      return kExitPass;
    }
  } catch (const Failure& f) {
    const char* msg = cg_last_error();
    std::cerr << "error: " << cg_status_name(f.status);
    if (msg != nullptr && *msg != '\0') std::cerr << ": " << msg;
    std::cerr << '\n';
    return exit_code(f.status);
  }
  return kExitPass;
}
