#pragma once

#include "scr/matrix.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace scr::app {

/// Defaults for every configurable key; a config file is merged over this
/// and explicit flags over the result.
nlohmann::json default_config();

/**
 * Similarity basis from the `data` section: identity first, then per
 * covariate column a kernel and/or outer-product matrix (in column order,
 * kernel before outer), then one indicator matrix per label file, one edge
 * matrix per edge file and one matrix per triplet file. Non-identity
 * matrices are l1-rescaled when `rescale` is set. Throws DataError when
 * the sources disagree on p.
 */
SimilarityBasis build_basis(const nlohmann::json& data, Index p);

/// Parses `args` (without the program name) and runs the subcommand.
/// Returns 0 on success, 1 for usage or data errors, 2 for numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scr::app
