#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "curvgraph/markov_chain.hpp"

namespace curvgraph {

// JSON chain file:
//   {"states":[...], "kernel":{"triplets":[[i,j,rate],...]}, "meta":{...}}
MarkovChain chain_from_json(const nlohmann::json& doc, const Tolerances& tol = {});
nlohmann::json chain_to_json(const MarkovChain& chain,
                             const nlohmann::json& meta = nlohmann::json::object());

// CSV edge list with header `src,dst,rate` (labels, not indices). States are
// numbered in order of first appearance. Rows whose mass falls short of one
// are topped up on the diagonal only when `complete_diagonal` is set.
MarkovChain chain_from_csv(std::istream& in, bool complete_diagonal,
                           const Tolerances& tol = {});

// Dispatches on extension (.csv, otherwise JSON). IoError on open failures
// and parse errors.
MarkovChain load_chain(const std::filesystem::path& path, bool complete_diagonal = false,
                       const Tolerances& tol = {});
void save_chain(const MarkovChain& chain, const std::filesystem::path& path,
                const nlohmann::json& meta = nlohmann::json::object());

}  // namespace curvgraph
