#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogmac/result_io.hpp"

namespace cogmac {

struct FigureResult {
    std::vector<ResultRow> rows;
    std::string manifest_json;
};

/// A named sweep with a pinned parameter set; values the setup leaves open
/// (channel realizations, M grids) are generated deterministically from the
/// seed and recorded in the manifest.
struct FigureRecipe {
    std::string name;
    std::string title;
    FigureResult (*run)(std::uint64_t seed);
};

const std::vector<FigureRecipe>& figure_recipes();
const FigureRecipe* find_figure(const std::string& name);

} // namespace cogmac
