#pragma once

#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"

#include <filesystem>
#include <string>

#include <json.hpp>

namespace finhom {

using json = nlohmann::ordered_json;

/// `{"n", "dist", "labels"?, "mode", "provenance"}`; exact entries are
/// "p/q" strings, approximate entries are numbers.
json space_to_json(const FiniteMetricSpace& space);
FiniteMetricSpace space_from_json(const json& j);

FiniteMetricSpace read_space(const std::filesystem::path& path);
void write_space(const FiniteMetricSpace& space, const std::filesystem::path& path);

/// Exact lengths become "p/q" strings, approximate ones numbers.
json length_to_json(const Length& l);
/// Accepts "p/q" strings, integers and floating point numbers.
Length length_from_json(const json& j);

} // namespace finhom
