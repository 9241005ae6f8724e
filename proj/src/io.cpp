#include "msfbm/io.hpp"

#include <cmath>
#include <cstdio>

#include "msfbm/rng.hpp"

namespace msfbm::io {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (std::isfinite(x) && s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

json to_json(const ProcessSpec& spec) {
  json j;
  j["coeffs"] = std::vector<double>(spec.coeffs().begin(), spec.coeffs().end());
  j["hurst"] = std::vector<double>(spec.hurst().begin(), spec.hurst().end());
  return j;
}

json to_json(const TimeGrid& grid) {
  json j;
  if (grid.is_uniform()) {
    j["kind"] = "uniform";
    j["n_points"] = grid.size();
    j["horizon"] = grid.horizon();
  } else {
    j["kind"] = "explicit";
    j["times"] = std::vector<double>(grid.times().begin(), grid.times().end());
  }
  return j;
}

json ensemble_metadata(const Ensemble& ens) {
  json j;
  j["spec"] = to_json(ens.spec);
  j["grid"] = to_json(ens.grid);
  j["n_reps"] = ens.n_reps();
  j["master_seed"] = ens.master_seed;
  j["method"] = to_string(ens.method);
  j["jitter"] = ens.jitter;
  j["normal_stream_version"] = rng::kNormalStreamVersion;
  return j;
}

json to_json(const Ensemble& ens) {
  json j;
  j["schema"] = "msfbm.ensemble/1";
  j["metadata"] = ensemble_metadata(ens);
  j["times"] = std::vector<double>(ens.grid.times().begin(), ens.grid.times().end());
  json paths = json::array();
  for (const auto& p : ens.paths) paths.push_back(p.values);
  j["paths"] = std::move(paths);
  return j;
}

namespace {

std::string join(std::span<const double> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ';';
    s += format_real(xs[i]);
  }
  return s;
}

}  // namespace

void write_ensemble_csv(std::ostream& out, const Ensemble& ens) {
  out << "# schema=msfbm.ensemble/1\n";
  out << "# coeffs=" << join(ens.spec.coeffs()) << '\n';
  out << "# hurst=" << join(ens.spec.hurst()) << '\n';
  out << "# master_seed=" << ens.master_seed << '\n';
  out << "# n_reps=" << ens.n_reps() << '\n';
  out << "# grid_points=" << ens.grid.size() << '\n';
  out << "# horizon=" << format_real(ens.grid.horizon()) << '\n';
  out << "# grid_kind=" << (ens.grid.is_uniform() ? "uniform" : "explicit") << '\n';
  out << "# method=" << to_string(ens.method) << '\n';
  out << "# jitter=" << format_real(ens.jitter) << '\n';
  out << "# normal_stream_version=" << rng::kNormalStreamVersion << '\n';
  out << "replica,t,value\n";
  for (std::size_t r = 0; r < ens.paths.size(); ++r) {
    const auto& p = ens.paths[r];
    for (std::size_t i = 0; i < p.size(); ++i) {
      out << r << ',' << format_real(ens.grid[i]) << ',' << format_real(p.values[i]) << '\n';
    }
  }
}

json to_json(const analysis::VariationReport& r) {
  json j;
  j["p"] = r.p;
  j["partition_sizes"] = r.partition_sizes;
  j["statistics"] = r.statistics;
  j["fitted_log_slope"] = r.fitted_log_slope;
  j["slope_stderr"] = r.slope_stderr;
  return j;
}

std::string to_string(analysis::DimensionMethod m) {
  switch (m) {
    case analysis::DimensionMethod::GraphBoxCount: return "GraphBoxCount";
    case analysis::DimensionMethod::LevelSetBoxCount: return "LevelSetBoxCount";
    case analysis::DimensionMethod::RangeBoxCount: return "RangeBoxCount";
  }
  return "?";
}

json to_json(const analysis::DimensionEstimate& d) {
  json j;
  j["value"] = d.value;
  j["stderr"] = d.stderr;
  j["scale_range"] = {d.scale_range.first, d.scale_range.second};
  j["method"] = to_string(d.method);
  return j;
}

json to_json(const analysis::HolderEstimate& h) {
  json j;
  j["h_hat"] = h.h_hat;
  j["stderr"] = h.stderr;
  j["lags"] = h.lags;
  j["variogram"] = h.variogram;
  return j;
}

json to_json(const analysis::NondiffProbe& p) {
  json rows = json::array();
  for (const auto& r : p.rows) rows.push_back({{"eps", r.eps}, {"mean_max_quotient", r.mean_max_quotient}});
  return {{"rows", rows}, {"slope", p.slope}, {"slope_stderr", p.slope_stderr}};
}

json to_json(const classify::SemimartingaleVerdict& v) {
  json j;
  j["is_semimartingale"] = v.is_semimartingale;
  j["witness"] = v.witness ? json(*v.witness + 1) : json(nullptr);
  j["reason"] = classify::to_string(v.reason);
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace msfbm::io
