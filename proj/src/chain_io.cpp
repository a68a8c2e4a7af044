#include "curvgraph/chain_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "curvgraph/error.hpp"

namespace curvgraph {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

MarkovChain chain_from_json(const nlohmann::json& doc, const Tolerances& tol) {
  if (!doc.is_object() || !doc.contains("states") || !doc.contains("kernel")) {
    throw Error(ErrorCode::invalid_argument, "chain file needs \"states\" and \"kernel\"");
  }
  std::vector<std::string> labels;
  for (const auto& s : doc.at("states")) {
    labels.push_back(s.is_string() ? s.get<std::string>() : s.dump());
  }
  const auto& kernel = doc.at("kernel");
  if (!kernel.is_object() || !kernel.contains("triplets")) {
    throw Error(ErrorCode::invalid_argument, "kernel needs \"triplets\"");
  }
  std::vector<Triplet> entries;
  for (const auto& t : kernel.at("triplets")) {
    if (!t.is_array() || t.size() != 3) {
      throw Error(ErrorCode::invalid_argument, "triplets are [src, dst, rate]");
    }
    const auto src = t[0].get<long long>();
    const auto dst = t[1].get<long long>();
    if (src < 0 || dst < 0) throw Error(ErrorCode::invalid_argument, "negative state index");
    entries.push_back({static_cast<std::size_t>(src), static_cast<std::size_t>(dst),
                       t[2].get<double>()});
  }
  return build_chain(std::move(labels), entries, tol);
}

nlohmann::json chain_to_json(const MarkovChain& chain, const nlohmann::json& meta) {
  nlohmann::json triplets = nlohmann::json::array();
  for (const Triplet& t : chain.triplets()) triplets.push_back({t.src, t.dst, t.rate});
  return {{"states", chain.labels()},
          {"kernel", {{"triplets", std::move(triplets)}}},
          {"meta", meta}};
}

MarkovChain chain_from_csv(std::istream& in, bool complete_diagonal, const Tolerances& tol) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::invalid_argument, "empty CSV chain");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"src", "dst", "rate"}) {
    throw Error(ErrorCode::invalid_argument, "CSV header must be src,dst,rate");
  }
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> index;
  auto lookup = [&](const std::string& label) {
    auto [it, inserted] = index.emplace(label, labels.size());
    if (inserted) labels.push_back(label);
    return it->second;
  };
  std::vector<Triplet> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) {
      throw Error(ErrorCode::invalid_argument, "line " + std::to_string(line_no) +
                                                   ": expected three fields");
    }
    double rate = 0.0;
    try {
      std::size_t used = 0;
      rate = std::stod(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument,
                  "line " + std::to_string(line_no) + ": bad rate '" + cells[2] + "'");
    }
    const std::size_t src = lookup(cells[0]);
    const std::size_t dst = lookup(cells[1]);
    entries.push_back({src, dst, rate});
  }
  if (complete_diagonal) {
    std::vector<double> mass(labels.size(), 0.0);
    for (const Triplet& t : entries) mass[t.src] += t.rate;
    for (std::size_t x = 0; x < labels.size(); ++x) {
      if (mass[x] < 1.0) entries.push_back({x, x, 1.0 - mass[x]});
    }
  }
  return build_chain(std::move(labels), entries, tol);
}

MarkovChain load_chain(const std::filesystem::path& path, bool complete_diagonal,
                       const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  if (path.extension() == ".csv") return chain_from_csv(in, complete_diagonal, tol);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error, path.string() + ": " + e.what());
  }
  try {
    return chain_from_json(doc, tol);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, path.string() + ": " + e.what());
  }
}

void save_chain(const MarkovChain& chain, const std::filesystem::path& path,
                const nlohmann::json& meta) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << chain_to_json(chain, meta).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace curvgraph
