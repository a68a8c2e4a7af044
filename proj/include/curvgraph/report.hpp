#pragma once

#include <iosfwd>

#include <json.hpp>

#include "curvgraph/audit_record.hpp"
#include "curvgraph/curvature.hpp"
#include "curvgraph/distance.hpp"
#include "curvgraph/functionals.hpp"
#include "curvgraph/markov_chain.hpp"
#include "curvgraph/transport.hpp"

namespace curvgraph {

// {"notion":..., "global":..., "per_locus":[...], "witness":[...], "meta":{...}}
nlohmann::json to_json(const CurvatureReport& report, const MarkovChain& chain);
nlohmann::json to_json(const AuditRecord& record);
nlohmann::json to_json(const FunctionalValue& value);
nlohmann::json to_json(const TransportPlan& plan);
nlohmann::json to_json(const DistanceMatrix& d, const MarkovChain& chain);

// Dense row-major CSV; the header row holds the state labels.
void write_csv(std::ostream& out, const DistanceMatrix& d, const MarkovChain& chain);

// JSON numbers cannot carry infinities; they are written as strings.
nlohmann::json json_number(double value);

}  // namespace curvgraph
