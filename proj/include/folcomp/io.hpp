#pragma once

#include <string>
#include <vector>

#include "folcomp/foliation.hpp"
#include "folcomp/grid.hpp"
#include "folcomp/map_model.hpp"
#include "json.hpp"

namespace folcomp {

using Json = nlohmann::ordered_json;

/// MapSpec <-> JSON with the field names of the struct. Unknown or
/// mistyped fields raise SpecInvalid; `n`, `phi_coeffs` and `psi_coeffs`
/// are optional.
Json map_spec_to_json(const MapSpec& spec);
MapSpec map_spec_from_json(const Json& j);
MapSpec load_map_spec(const std::string& path);

std::string read_text(const std::string& path);
/// Writes `content`, creating parent directories. Throws IoError.
void write_text(const std::string& path, const std::string& content);

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

Json grid_to_json(const Grid& grid);
Grid grid_from_json(const Json& j);

/// CSV with columns x1..xn, y, then `names` for the node values.
std::string node_data_csv(const NodeData& data, const std::vector<std::string>& names);
/// Reads values written by node_data_csv back onto `grid`; node
/// coordinates must match exactly.
NodeData parse_node_data_csv(const std::string& text, const Grid& grid, int width);

std::string field_csv(const Field& field);
Field parse_field_csv(const std::string& text, const Grid& grid, double L_bound);

std::string leaf_csv(const Leaf& leaf);
std::string reduced_csv(const ReducedMap& rm);

struct SvgSeries {
    std::vector<double> xs;
    std::vector<double> ys;
    std::string color = "#1f77b4";
};

/// Minimal line plot: one polyline per series over the given data box.
std::string render_svg(const std::string& title, const std::vector<SvgSeries>& series, double xmin, double xmax,
                       double ymin, double ymax);

} // namespace folcomp
