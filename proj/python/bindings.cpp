#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tdvmm/analog_model.hpp"
#include "tdvmm/cell_model.hpp"
#include "tdvmm/chain_model.hpp"
#include "tdvmm/digital_model.hpp"
#include "tdvmm/errors.hpp"
#include "tdvmm/explorer.hpp"
#include "tdvmm/mc_oracle.hpp"
#include "tdvmm/tdc_model.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace tdvmm;

namespace {

py::dict row_to_dict(const SweepRow& r) {
  py::dict d;
  d["domain"] = to_string(r.domain);
  d["n"] = r.n;
  d["b"] = r.b;
  d["m"] = r.m;
  d["mode"] = to_string(r.mode);
  d["clip_bits"] = r.clip_bits;
  d["feasible"] = r.feasible;
  d["status"] = r.status;
  d["energy_per_mac"] = r.energy_per_mac;
  d["throughput"] = r.throughput;
  d["area_per_mac"] = r.area_per_mac;
  d["r"] = r.r;
  d["enob"] = r.enob ? py::object(py::float_(*r.enob)) : py::object(py::none());
  d["l_osc"] = r.l_osc ? py::object(py::int_(*r.l_osc)) : py::object(py::none());
  d["tdc"] = to_string(r.tdc);
  d["e_tdc_hybrid"] = r.e_tdc_hybrid ? py::object(py::float_(*r.e_tdc_hybrid)) : py::object(py::none());
  d["e_tdc_sar"] = r.e_tdc_sar ? py::object(py::float_(*r.e_tdc_sar)) : py::object(py::none());
  d["mu_chain"] = r.mu_chain;
  d["sigma_achieved"] = r.sigma_achieved;
  d["sigma_budget"] = r.sigma_budget;
  return d;
}

SweepConfig config_with(const std::filesystem::path& path, const py::kwargs& overrides) {
  SweepConfig cfg = load_sweep_config(path);
  for (const auto& [key, value] : overrides) {
    const auto k = key.cast<std::string>();
    if (k == "domains") {
      cfg.domains.clear();
      for (const auto& d : value.cast<std::vector<std::string>>()) cfg.domains.push_back(parse_domain(d));
    } else if (k == "n_values") {
      cfg.n_values = value.cast<std::vector<int>>();
    } else if (k == "b_values") {
      cfg.b_values = value.cast<std::vector<int>>();
    } else if (k == "m") {
      cfg.m = value.cast<int>();
    } else if (k == "mode") {
      cfg.mode = parse_mode(value.cast<std::string>());
    } else if (k == "clip_bits") {
      cfg.clip_bits = value.cast<int>();
    } else if (k == "weight_density") {
      cfg.weight_density = value.cast<double>();
    } else if (k == "threads") {
      cfg.threads = value.cast<int>();
    } else {
      throw ConfigError("unknown sweep option '" + k + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "TD / analog / digital VMM design-space explorer";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<IngestError>(m, "IngestError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
  py::register_exception<EmptySelectionError>(m, "EmptySelectionError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<CellSpec>(m, "CellSpec")
      .def_readonly("bit_width", &CellSpec::bit_width)
      .def_readonly("e_op", &CellSpec::e_op)
      .def_readonly("e_op_per_r", &CellSpec::e_op_per_r)
      .def_readonly("d_step", &CellSpec::d_step)
      .def_readonly("d_max", &CellSpec::d_max)
      .def("inl", [](const CellSpec& s, std::size_t x, std::size_t w) { return s.inl(x, w); }, "x"_a, "w"_a)
      .def("sigma", [](const CellSpec& s, std::size_t x, std::size_t w) { return s.sigma(x, w); }, "x"_a, "w"_a);
  m.def("load_cell_spec", &load_cell_spec, "path"_a);

  py::class_<CellErrorStats>(m, "CellErrorStats")
      .def(py::init<double, double, double>(), "mu"_a, "evpv"_a, "vhm"_a)
      .def_readonly("mu", &CellErrorStats::mu)
      .def_readonly("evpv", &CellErrorStats::evpv)
      .def_readonly("vhm", &CellErrorStats::vhm)
      .def_property_readonly("variance", &CellErrorStats::variance);
  m.def(
      "cell_error_stats",
      [](const CellSpec& s, double pw) { return cell_error_stats(s, InputDistribution::uniform(s.bit_width, pw)); },
      "spec"_a, "weight_density"_a = 0.3, "Cell statistics for uniform activations.");

  py::class_<ChainErrorStats>(m, "ChainErrorStats")
      .def_readonly("n", &ChainErrorStats::n)
      .def_readonly("r", &ChainErrorStats::r)
      .def_readonly("mu", &ChainErrorStats::mu)
      .def_readonly("variance", &ChainErrorStats::variance)
      .def_readonly("sigma", &ChainErrorStats::sigma);
  m.def("chain_stats", &chain_stats, "cell"_a, "n"_a, "r"_a);
  m.def(
      "solve_redundancy",
      [](const CellErrorStats& c, int n, std::optional<double> sigma_max, int cap) {
        return solve_redundancy(c, n, sigma_max ? ErrorBudget::relaxed(*sigma_max) : ErrorBudget::precise(), cap);
      },
      "cell"_a, "n"_a, "sigma_max"_a = py::none(), "cap"_a = kDefaultRedundancyCap,
      "Smallest R meeting the budget; precise budget when sigma_max is None.");
  m.def("td_cell_area", &td_cell_area, "b"_a, "r"_a, "cpp"_a, "h_cell"_a);

  py::class_<TdcParams>(m, "TdcParams")
      .def_readonly("e_td_and", &TdcParams::e_td_and)
      .def_readonly("e_sample", &TdcParams::e_sample)
      .def_readonly("e_cnt", &TdcParams::e_cnt)
      .def_readonly("e_cnt_load", &TdcParams::e_cnt_load);
  m.def("load_tdc_params", &load_tdc_params, "path"_a);
  m.def("hybrid_tdc_energy", &hybrid_tdc_energy, "params"_a, "n"_a, "r"_a, "m"_a, "l_osc"_a);
  m.def("optimal_losc", &optimal_losc, "params"_a, "n"_a, "r"_a, "m"_a);
  m.def("sar_tdc_energy", &sar_tdc_energy, "params"_a, "b_range"_a, "m"_a);

  m.def("adc_energy", &adc_energy, "enob"_a, "k1"_a, "k2"_a);
  m.def("enob_from_snr", &enob_from_snr, "snr_db"_a);
  m.def("required_enob", &required_enob, "full_scale"_a, "sigma_max"_a);
  m.def(
      "fit_adc",
      [](const std::filesystem::path& survey, double min_rate) {
        const auto env = fit_adc_envelope(read_adc_survey(survey), min_rate);
        return py::module_::import("json").attr("loads")(adc_envelope_to_json(env));
      },
      "survey"_a, "min_rate"_a = 1e6, "Fits the ADC envelope; returns the envelope JSON as a dict.");

  m.def(
      "digital_energy",
      [](const std::filesystem::path& table, int n, int b) { return load_digital_table(table).energy_per_mac(n, b); },
      "table"_a, "n"_a, "b"_a);

  m.def(
      "simulate_chain",
      [](const CellSpec& spec, int n, int r, std::int64_t trials, std::uint64_t seed, double pw,
         const std::string& mismatch, int threads) {
        MonteCarloConfig cfg;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.n = n;
        cfg.r = r;
        cfg.inputs = InputDistribution::uniform(spec.bit_width, pw);
        if (mismatch != "static" && mismatch != "fresh") throw ConfigError("mismatch must be static or fresh");
        cfg.mismatch = mismatch == "fresh" ? MismatchMode::kFresh : MismatchMode::kStatic;
        cfg.threads = threads;
        std::vector<double> samples;
        {
          py::gil_scoped_release release;
          samples = simulate_chain_samples(spec, cfg);
        }
        return py::array_t<double>(static_cast<py::ssize_t>(samples.size()), samples.data());
      },
      "spec"_a, "n"_a, "r"_a, "trials"_a = 100000, "seed"_a = 1, "weight_density"_a = 0.3,
      "mismatch"_a = "static", "threads"_a = 0, "Per-trial chain error in delay steps.");

  m.def(
      "explore",
      [](const std::filesystem::path& config, const std::optional<std::filesystem::path>& csv,
         const std::optional<std::filesystem::path>& plot, const std::string& plot_kind, const py::kwargs& kw) {
        const auto cfg = config_with(config, kw);
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = run_sweep(cfg);
        }
        if (csv) emit_csv(res, *csv);
        if (plot) emit_plot(res, parse_plot_kind(plot_kind), *plot);
        py::list rows;
        for (const auto& r : res.rows) rows.append(row_to_dict(r));
        return rows;
      },
      "config"_a, "csv"_a = py::none(), "plot"_a = py::none(), "plot_kind"_a = "energy",
      "Runs a sweep; keyword overrides: domains, n_values, b_values, m, mode, clip_bits, "
      "weight_density, threads.");

  m.def(
      "resnet_scenario",
      [](const std::filesystem::path& config, const py::kwargs& kw) {
        const auto res = resnet_scenario(config_with(config, kw));
        py::list rows;
        for (const auto& r : res.rows) rows.append(row_to_dict(r));
        return rows;
      },
      "config"_a);
}
