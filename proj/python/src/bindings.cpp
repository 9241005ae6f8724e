#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msfbm/analysis.hpp"
#include "msfbm/classify.hpp"
#include "msfbm/errors.hpp"
#include "msfbm/io.hpp"
#include "msfbm/kernels.hpp"
#include "msfbm/sampler.hpp"
#include "msfbm/verify.hpp"

namespace py = pybind11;
using namespace msfbm;

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

TimeGrid make_grid(const std::vector<double>& times) { return TimeGrid(times); }

SamplePath make_path(const std::vector<double>& times, const std::vector<double>& values) {
  return SamplePath(make_grid(times), values);
}

std::vector<SamplePath> make_paths(const std::vector<double>& times, const Matrix& values) {
  const TimeGrid grid = make_grid(times);
  if (static_cast<std::size_t>(values.cols()) != grid.size()) throw GridMismatch("paths have the wrong number of columns");
  std::vector<SamplePath> out;
  out.reserve(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out.emplace_back(grid, std::vector<double>(values.row(r).data(), values.row(r).data() + values.cols()));
  }
  return out;
}

py::dict dimension(const analysis::DimensionEstimate& d) {
  py::dict out;
  out["value"] = d.value;
  out["stderr"] = d.stderr;
  out["scale_range"] = py::make_tuple(d.scale_range.first, d.scale_range.second);
  out["method"] = io::to_string(d.method);
  return out;
}

EnsembleOptions::Route parse_route(const std::string& r) {
  if (r == "auto") return EnsembleOptions::Route::Auto;
  if (r == "exact") return EnsembleOptions::Route::Exact;
  if (r == "via_fbm") return EnsembleOptions::Route::ViaFbm;
  throw ValidationError("route must be auto, exact or via_fbm");
}

}  // namespace

PYBIND11_MODULE(_msfbm, m) {
  m.doc() = "Mixed sub-fractional Brownian motion: kernels, exact sampling and diagnostics";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<PreconditionViolated>(m, "PreconditionViolated", validation.ptr());
  auto runtime = PyExc_RuntimeError;
  py::register_exception<FactorizationFailure>(m, "FactorizationFailure", runtime);
  py::register_exception<GridMismatch>(m, "GridMismatch", runtime);
  py::register_exception<InsufficientResolution>(m, "InsufficientResolution", runtime);
  py::register_exception<InsufficientReplicas>(m, "InsufficientReplicas", runtime);
  py::register_exception<LevelNotCrossed>(m, "LevelNotCrossed", runtime);

  py::class_<ProcessSpec>(m, "ProcessSpec")
      .def(py::init<std::vector<double>, std::vector<double>, double>(), py::arg("coeffs"), py::arg("hurst"),
           py::arg("half_tolerance") = 0.0)
      .def_property_readonly("coeffs", [](const ProcessSpec& s) { return std::vector<double>(s.coeffs().begin(), s.coeffs().end()); })
      .def_property_readonly("hurst", [](const ProcessSpec& s) { return std::vector<double>(s.hurst().begin(), s.hurst().end()); })
      .def_property_readonly("active_set", &ProcessSpec::active_set)
      .def_property_readonly("h_min", &ProcessSpec::h_min)
      .def_property_readonly("h_max", &ProcessSpec::h_max)
      .def("__len__", &ProcessSpec::size)
      .def("__eq__", [](const ProcessSpec& a, const ProcessSpec& b) { return a == b; })
      .def("__repr__", [](const ProcessSpec& s) { return "ProcessSpec(" + io::to_json(s).dump() + ")"; });

  // Kernels
  m.def("fbm_cov", &kernels::fbm_cov, py::arg("h"), py::arg("s"), py::arg("t"));
  m.def("sfbm_cov", &kernels::sfbm_cov, py::arg("h"), py::arg("s"), py::arg("t"));
  m.def("msfbm_cov", &kernels::msfbm_cov, py::arg("spec"), py::arg("s"), py::arg("t"));
  m.def("msfbm_var", &kernels::msfbm_var, py::arg("spec"), py::arg("t"));
  m.def("mfbm_cov", &kernels::mfbm_cov, py::arg("spec"), py::arg("s"), py::arg("t"));
  m.def("increment_second_moment", &kernels::increment_second_moment, py::arg("spec"), py::arg("s"), py::arg("t"));
  m.def(
      "increment_bounds",
      [](const ProcessSpec& spec, double s, double t) {
        const auto b = kernels::increment_bounds(spec, s, t);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("spec"), py::arg("s"), py::arg("t"));
  m.def(
      "increment_cov",
      [](const ProcessSpec& spec, double u, double v, double s, double t) {
        return kernels::increment_cov(spec, kernels::IncrementWindow(u, v, s, t));
      },
      py::arg("spec"), py::arg("u"), py::arg("v"), py::arg("s"), py::arg("t"));
  m.def("lag_cov_c", &kernels::lag_cov_c, py::arg("spec"), py::arg("x"), py::arg("n"));
  m.def("lag_cov_c_closed_form", &kernels::lag_cov_c_closed_form, py::arg("spec"), py::arg("p"), py::arg("n"));
  m.def("lag_cov_c_asymptotic", &kernels::lag_cov_c_asymptotic, py::arg("spec"), py::arg("p"), py::arg("n"));
  m.def("mfbm_lag_cov_r", &kernels::mfbm_lag_cov_r, py::arg("spec"), py::arg("n"));
  m.def("stationarity_gap", &kernels::stationarity_gap, py::arg("spec"), py::arg("x"), py::arg("n"));
  m.def("markov_residual", &kernels::markov_residual, py::arg("spec"), py::arg("s"), py::arg("t"), py::arg("u"));
  m.def("conditional_variance", &kernels::conditional_variance, py::arg("spec"), py::arg("t"), py::arg("s"));
  m.def("rescale_coeffs", &kernels::rescale_coeffs, py::arg("spec"), py::arg("h"));

  // Sampling
  m.def(
      "gram_matrix", [](const ProcessSpec& spec, const std::vector<double>& times) { return gram_matrix(spec, make_grid(times)); },
      py::arg("spec"), py::arg("times"));
  m.def(
      "uniform_grid",
      [](std::size_t n_points, double horizon) {
        const auto g = TimeGrid::uniform(n_points, horizon);
        return std::vector<double>(g.times().begin(), g.times().end());
      },
      py::arg("n_points"), py::arg("horizon") = 1.0);
  m.def(
      "sample_exact",
      [](const ProcessSpec& spec, const std::vector<double>& times, std::uint64_t seed) {
        return sample_exact(spec, make_grid(times), seed).values;
      },
      py::arg("spec"), py::arg("times"), py::arg("seed"));
  m.def(
      "sample_ensemble",
      [](const ProcessSpec& spec, const std::vector<double>& times, std::size_t n_reps, std::uint64_t seed,
         const std::string& route, std::size_t dense_limit, unsigned threads) {
        EnsembleOptions o;
        o.route = parse_route(route);
        o.dense_limit = dense_limit;
        o.threads = threads;
        const Ensemble ens = [&] {
          py::gil_scoped_release release;
          return sample_ensemble(spec, make_grid(times), n_reps, seed, o);
        }();
        Matrix values(static_cast<Eigen::Index>(ens.n_reps()), static_cast<Eigen::Index>(ens.grid.size()));
        for (std::size_t r = 0; r < ens.n_reps(); ++r) {
          for (std::size_t i = 0; i < ens.grid.size(); ++i) values(Eigen::Index(r), Eigen::Index(i)) = ens.paths[r].values[i];
        }
        py::dict out;
        out["values"] = values;
        out["times"] = times;
        out["method"] = to_string(ens.method);
        out["jitter"] = ens.jitter;
        out["master_seed"] = ens.master_seed;
        out["replica_seeds"] = ens.replica_seeds;
        return out;
      },
      py::arg("spec"), py::arg("times"), py::arg("n_reps"), py::arg("seed"), py::arg("route") = "auto",
      py::arg("dense_limit") = kDefaultDenseLimit, py::arg("threads") = 0u);

  // Analysis
  m.def(
      "p_variation_stat",
      [](const std::vector<double>& times, const std::vector<double>& values, double p, std::size_t n_sub) {
        return analysis::p_variation_stat(make_path(times, values), p, n_sub);
      },
      py::arg("times"), py::arg("values"), py::arg("p"), py::arg("n_sub"));
  m.def(
      "qv_scaling_exponent",
      [](const ProcessSpec& spec, const std::vector<int>& levels, std::size_t n_reps, std::uint64_t seed, double p) {
        const auto r = analysis::qv_scaling_exponent(spec, levels, n_reps, seed, p);
        py::dict out;
        out["p"] = r.p;
        out["partition_sizes"] = r.partition_sizes;
        out["statistics"] = r.statistics;
        out["statistic_stderrs"] = r.statistic_stderrs;
        out["fitted_log_slope"] = r.fitted_log_slope;
        out["slope_stderr"] = r.slope_stderr;
        return out;
      },
      py::arg("spec"), py::arg("levels"), py::arg("n_reps"), py::arg("seed"), py::arg("p") = 2.0);
  m.def(
      "holder_exponent_estimate",
      [](const std::vector<double>& times, const Matrix& values) {
        const auto h = analysis::holder_exponent_estimate(make_paths(times, values));
        return py::make_tuple(h.h_hat, h.stderr);
      },
      py::arg("times"), py::arg("values"));
  m.def(
      "nondiff_probe",
      [](const std::vector<double>& times, const Matrix& values, double t0) {
        const auto p = analysis::nondiff_probe(make_paths(times, values), t0);
        py::list rows;
        for (const auto& r : p.rows) rows.append(py::make_tuple(r.eps, r.mean_max_quotient));
        py::dict out;
        out["rows"] = rows;
        out["slope"] = p.slope;
        out["slope_stderr"] = p.slope_stderr;
        return out;
      },
      py::arg("times"), py::arg("values"), py::arg("t0"));
  m.def(
      "graph_box_dimension",
      [](const std::vector<double>& times, const std::vector<double>& values) {
        return dimension(analysis::graph_box_dimension(make_path(times, values)));
      },
      py::arg("times"), py::arg("values"));
  m.def(
      "level_set_box_dimension",
      [](const std::vector<double>& times, const std::vector<double>& values, double x, double eps) {
        return dimension(analysis::level_set_box_dimension(make_path(times, values), x, eps));
      },
      py::arg("times"), py::arg("values"), py::arg("x"), py::arg("eps"));
  m.def(
      "range_dimension",
      [](const std::vector<double>& times, const std::vector<double>& values) {
        return dimension(analysis::range_dimension(make_path(times, values)));
      },
      py::arg("times"), py::arg("values"));
  m.def("srd_partial_sums", &analysis::srd_partial_sums, py::arg("spec"), py::arg("p"), py::arg("n_max"));

  // Classification
  m.def(
      "semimartingale_classify",
      [](const ProcessSpec& spec) {
        const auto v = classify::semimartingale_classify(spec);
        py::dict out;
        out["is_semimartingale"] = v.is_semimartingale;
        out["witness"] = v.witness ? py::object(py::int_(*v.witness)) : py::object(py::none());
        out["reason"] = classify::to_string(v.reason);
        return out;
      },
      py::arg("spec"));
  m.def("markov_verdict", &classify::markov_verdict, py::arg("spec"));
  m.def(
      "increment_sign_predict", [](const ProcessSpec& spec) { return classify::to_string(classify::increment_sign_predict(spec)); },
      py::arg("spec"));
  m.def(
      "dependence_compare",
      [](const ProcessSpec& spec, std::size_t i, double b, double c, double u, double v, double s, double t) {
        return classify::to_string(classify::dependence_compare(spec, i, b, c, kernels::IncrementWindow(u, v, s, t)));
      },
      py::arg("spec"), py::arg("i"), py::arg("b"), py::arg("c"), py::arg("u"), py::arg("v"), py::arg("s"), py::arg("t"));

  // Verification
  m.def(
      "verify_json",
      [](const std::string& suite, std::optional<ProcessSpec> spec, std::uint64_t seed, std::size_t draws, std::size_t reps,
         unsigned threads) {
        verify::Options o;
        o.spec = std::move(spec);
        o.seed = seed;
        o.draws = draws;
        o.reps = reps;
        o.threads = threads;
        std::vector<verify::Report> reports;
        py::gil_scoped_release release;
        if (suite == "all") {
          for (auto s : verify::kAllSuites) reports.push_back(verify::run(s, o));
        } else {
          const auto s = verify::parse_suite(suite);
          if (!s) throw ValidationError("unknown suite: " + suite);
          reports.push_back(verify::run(*s, o));
        }
        return io::dump(verify::to_json(reports));
      },
      py::arg("suite") = "all", py::arg("spec") = py::none(), py::arg("seed") = verify::Options{}.seed,
      py::arg("draws") = verify::Options{}.draws, py::arg("reps") = verify::Options{}.reps, py::arg("threads") = 0u);
}
