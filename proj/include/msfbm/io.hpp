#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "msfbm/analysis.hpp"
#include "msfbm/classify.hpp"
#include "msfbm/grid.hpp"
#include "msfbm/process_spec.hpp"
#include "msfbm/sampler.hpp"

/// Serialization. Output is a pure function of the inputs: no timestamps,
/// no host information, fixed key order (nlohmann::json sorts object keys).
namespace msfbm::io {

using nlohmann::json;

/// printf("%.17g"), with ".0" appended when the result reads as an integer.
std::string format_real(double x);

json to_json(const ProcessSpec& spec);
/// Uniform grids as {"kind": "uniform", "n_points", "horizon"}, others as
/// {"kind": "explicit", "times": [...]}.
json to_json(const TimeGrid& grid);
json ensemble_metadata(const Ensemble& ens);
/// Metadata plus one array of values per replica.
json to_json(const Ensemble& ens);

/// "# key=value" metadata lines, then `replica,t,value` rows.
void write_ensemble_csv(std::ostream& out, const Ensemble& ens);

json to_json(const analysis::VariationReport& r);
json to_json(const analysis::DimensionEstimate& d);
json to_json(const analysis::HolderEstimate& h);
json to_json(const analysis::NondiffProbe& p);
/// The witness is written one-based (k_0 in 1..N); the struct holds it zero-based.
json to_json(const classify::SemimartingaleVerdict& v);

std::string to_string(analysis::DimensionMethod m);

/// Indented JSON text terminated by a newline.
std::string dump(const json& j);

}  // namespace msfbm::io
