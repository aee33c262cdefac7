#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "kim/connection.hpp"
#include "kim/cohomdim.hpp"
#include "kim/criteria.hpp"
#include "kim/intersect.hpp"
#include "kim/lie.hpp"

namespace kim::io {

using nlohmann::json;

// FNV-1a 64-bit digest of a byte string, hex-encoded; used to stamp reports.
std::string digest_hex(const std::string& bytes);
std::string read_file(const std::string& path);

// "(num) / (den)" or a plain polynomial in the given variables.
RationalFunction parse_ratfun(const std::vector<std::string>& vars, const std::string& text);

// {"generators": m, "class": n, "quotient": "free" | "metabelian" |
//  {"surface": g, "metabelian": bool} | {"ideal": [...]},
//  "involution": [signed 1-based images]}
lie::LieAlgebraSpec lie_spec_from_json(const json& j);
json lie_spec_to_json(const lie::LieAlgebraSpec& spec);

criteria::CurveData curve_from_json(const json& j);
json curve_to_json(const criteria::CurveData& c);

cohom::RepDescriptor rep_from_json(const json& j);
cohom::SubspaceData subspaces_from_json(const json& j);

// {"params": [...], "z": [...], "t": [...], "ideal": [...], "order": n}
intersect::FormalSubvariety subvariety_from_json(const json& j,
                                                 const std::vector<std::string>& ambient_vars);

json connection_to_json(const conn::ReducedConnection& c);
// Rebuilds the matrix over the chart named in the file; entries and the
// S_1 rows are read back, the chain is rebuilt.
std::pair<conn::FormMatrix, std::vector<MatQ>> connection_from_json(const json& j);

json gauge_to_json(const conn::GaugeTransform& g);

}  // namespace kim::io
