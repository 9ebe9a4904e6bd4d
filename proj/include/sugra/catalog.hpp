#pragma once

// Named backgrounds with builder parameters, and the pp-wave profile solver.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sugra/sugra.hpp"

namespace sugra {

// Solve -(H_x1x1 + H_x2x2 + H_x3x3) = rhs for a profile H on flat transverse
// space, where rhs is polynomial in x with coefficients depending on u only.
// A constant rhs c0 gives -c0/6 (x1^2 + x2^2 + x3^2); otherwise H is built by
// repeated antidifferentiation in x1 with zero integration constants.
// Throws InputError if rhs is not polynomial in x or depends on v (or on any
// other coordinate).
Expr solve_walker_H(const Expr& rhs, std::size_t u, std::array<std::size_t, 3> x, std::size_t v);

struct CatalogParam {
  std::string name;
  std::string default_value;  // expression text; empty when derived from other parameters
  std::string doc;
};

struct CatalogInfo {
  std::string id;
  std::string description;
  std::vector<CatalogParam> params;
  std::string perturb_key;  // parameter scaled by the default perturbation check
};

const std::vector<CatalogInfo>& catalog();
const CatalogInfo* find_catalog_entry(const std::string& id);

struct BuildOptions {
  std::map<std::string, std::string> params;          // overrides, as expression text
  std::optional<std::pair<std::string, double>> perturb;  // parameter name and factor
};

// Throws InputError for an unknown id, unknown parameter or perturbation key,
// or a parameter outside its valid range.
Background build_background(const std::string& id, const BuildOptions& opts = {});

}  // namespace sugra
