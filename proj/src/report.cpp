#include "curvgraph/report.hpp"

#include <cmath>
#include <ostream>

namespace curvgraph {

nlohmann::json json_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

namespace {

nlohmann::json numbers(std::span<const double> values) {
  nlohmann::json out = nlohmann::json::array();
  for (double v : values) out.push_back(json_number(v));
  return out;
}

nlohmann::json square(std::span<const double> values, std::size_t n) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) out.push_back(numbers(values.subspan(i * n, n)));
  return out;
}

}  // namespace

nlohmann::json to_json(const CurvatureReport& report, const MarkovChain& chain) {
  const auto& labels = chain.labels();
  nlohmann::json out;
  out["notion"] = curvature_notion_name(report.notion);
  out["global"] = json_number(report.global_value);
  out["label"] = report.label;
  nlohmann::json loci = nlohmann::json::array();
  for (const auto& l : report.per_locus) {
    nlohmann::json names = nlohmann::json::array();
    for (std::size_t x : l.locus) names.push_back(labels[x]);
    loci.push_back({{"locus", names}, {"value", json_number(l.value)}});
  }
  out["per_locus"] = std::move(loci);
  out["witness"] = numbers(report.witness);
  nlohmann::json wl = nlohmann::json::array();
  for (std::size_t x : report.witness_locus) wl.push_back(labels[x]);
  out["witness_locus"] = std::move(wl);
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : report.meta) meta[k] = json_number(v);
  out["meta"] = std::move(meta);
  return out;
}

nlohmann::json to_json(const AuditRecord& record) {
  nlohmann::json out;
  out["theorem_tag"] = theorem_tag_name(record.tag);
  out["instance"] = record.instance;
  out["lhs"] = json_number(record.lhs);
  out["rhs"] = json_number(record.rhs);
  out["slack"] = json_number(record.slack);
  out["pass"] = record.pass;
  out["witness"] = numbers(record.witness);
  if (!record.note.empty()) out["note"] = record.note;
  return out;
}

nlohmann::json to_json(const FunctionalValue& value) {
  return {{"kind", functional_kind_name(value.kind)}, {"value", json_number(value.value)}};
}

nlohmann::json to_json(const TransportPlan& plan) {
  nlohmann::json out;
  out["kind"] = plan_kind_name(plan.kind);
  out["value"] = json_number(plan.value);
  out["weights"] = plan.weights.empty() ? nlohmann::json::array() : square(plan.weights, plan.n);
  return out;
}

nlohmann::json to_json(const DistanceMatrix& d, const MarkovChain& chain) {
  nlohmann::json out;
  out["kind"] = distance_kind_name(d.kind());
  out["states"] = chain.labels();
  out["matrix"] = square(d.values(), d.size());
  return out;
}

void write_csv(std::ostream& out, const DistanceMatrix& d, const MarkovChain& chain) {
  const auto& labels = chain.labels();
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? "," : "") << labels[i];
  out << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) out << (j ? "," : "") << d(i, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace curvgraph
