#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rtqw/cli.hpp"
#include "rtqw/markov.hpp"
#include "rtqw/mc.hpp"
#include "rtqw/rates.hpp"

namespace py = pybind11;
using namespace rtqw;

namespace {

py::dict distribution_dict(const LatticeDistribution& dist) {
  py::dict out;
  dist.for_each([&](const Site& k, double w) {
    if (w != 0.0) out[py::tuple(py::cast(k))] = w;
  });
  return out;
}

struct IidSpectral {
  SpectralModel model;
  CyclicSubspace sub;
};

IidSpectral make_spectral(const FiniteCoinEnsemble& e, const JumpFunction& jump) {
  IidSpectral s{iid_model(e, jump), {}};
  s.sub = cyclic_subspace(s.model);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum walks with random coins";
  m.attr("__version__") = RTQW_VERSION;

  py::register_exception<AssumptionError>(m, "AssumptionError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<JumpFunction>(m, "JumpFunction")
      .def(py::init<int, std::vector<Site>>(), py::arg("dim"), py::arg("jumps"))
      .def_static("nearest_neighbour", &JumpFunction::nearest_neighbour, py::arg("dim"))
      .def_property_readonly("dim", &JumpFunction::dim)
      .def_property_readonly("jumps", &JumpFunction::jumps)
      .def("mean", &JumpFunction::mean);

  py::class_<Coin>(m, "Coin")
      .def(py::init<CMatrix>(), py::arg("matrix"))
      .def_static("identity", &Coin::identity, py::arg("coin_dim"))
      .def_static("hadamard", &Coin::hadamard)
      .def_static("grover", &Coin::grover, py::arg("coin_dim"))
      .def_property_readonly("matrix", &Coin::matrix)
      .def_property_readonly("coin_dim", &Coin::coin_dim);

  py::class_<FiniteCoinEnsemble>(m, "FiniteCoinEnsemble")
      .def(py::init<std::vector<Coin>, std::vector<double>>(), py::arg("coins"), py::arg("probs"))
      .def_property_readonly("coins", &FiniteCoinEnsemble::coins)
      .def_property_readonly("probs", &FiniteCoinEnsemble::probs);

  py::class_<MarkovCoinProcess>(m, "MarkovCoinProcess")
      .def(py::init<std::vector<Coin>, RMatrix, RVector>(), py::arg("coins"), py::arg("transition"),
           py::arg("initial"))
      .def_property_readonly("transition", &MarkovCoinProcess::transition)
      .def_property_readonly("initial", &MarkovCoinProcess::initial);

  m.def(
      "evolve_distribution",
      [](const CVector& phi0, const std::vector<Coin>& coins, const JumpFunction& jump) {
        return distribution_dict(
            position_distribution(evolve(WalkState::localized(phi0, Site(jump.dim(), 0)), coins, jump)));
      },
      py::arg("phi0"), py::arg("coins"), py::arg("jump"),
      "Position distribution {site: weight} after applying the coins in order.");

  m.def(
      "averaged_distribution",
      [](const FiniteCoinEnsemble& e, const JumpFunction& jump, int n, const CVector& phi0) {
        return distribution_dict(averaged_distribution(expected_doubled(e), jump, n, phi0));
      },
      py::arg("ensemble"), py::arg("jump"), py::arg("n"), py::arg("phi0"));

  m.def(
      "averaged_distribution_markov",
      [](const MarkovCoinProcess& p, const JumpFunction& jump, int n, const CVector& phi0) {
        return distribution_dict(averaged_distribution_markov(p, jump, n, phi0));
      },
      py::arg("process"), py::arg("jump"), py::arg("n"), py::arg("phi0"));

  m.def(
      "diffusion_matrix",
      [](const FiniteCoinEnsemble& e, const JumpFunction& jump, const RVector& v, const std::string& method) {
        const IidSpectral s = make_spectral(e, jump);
        if (method != "resolvent" && method != "hessian")
          throw std::invalid_argument("method must be 'resolvent' or 'hessian'");
        return diffusion_matrix(s.model, s.sub, v,
                                method == "hessian" ? DiffusionMethod::Hessian : DiffusionMethod::Resolvent);
      },
      py::arg("ensemble"), py::arg("jump"), py::arg("v"), py::arg("method") = "resolvent");

  m.def(
      "averaged_diffusion",
      [](const FiniteCoinEnsemble& e, const JumpFunction& jump, int grid) {
        const IidSpectral s = make_spectral(e, jump);
        return averaged_diffusion(s.model, s.sub, grid);
      },
      py::arg("ensemble"), py::arg("jump"), py::arg("grid") = 64);

  m.def(
      "assumption_holds",
      [](const FiniteCoinEnsemble& e, const JumpFunction& jump) {
        const IidSpectral s = make_spectral(e, jump);
        return check_assumption(s.model, s.sub).holds;
      },
      py::arg("ensemble"), py::arg("jump"));

  m.def(
      "md_rate",
      [](const FiniteCoinEnsemble& e, const JumpFunction& jump, const RVector& x) {
        const IidSpectral s = make_spectral(e, jump);
        const DiffusionFamily fam{jump.dim(), [&](const RVector& v) { return diffusion_matrix(s.model, s.sub, v); }};
        return md_rate(fam, x).legendre.value;
      },
      py::arg("ensemble"), py::arg("jump"), py::arg("x"));

  m.def(
      "ld_rate",
      [](const std::string& config_path, const RVector& x) {
        const ModelConfig cfg = load_config(config_path);
        return ld_rate(cfg.chain(), x).value;
      },
      py::arg("config_path"), py::arg("x"), "Large deviation rate of a permutation-coin model given by a config file.");

  m.def(
      "mc_char_function",
      [](const FiniteCoinEnsemble& e, const CVector& phi0, const JumpFunction& jump, const RVector& y, int n,
         std::size_t samples, std::uint64_t seed) {
        const McComplex r = mc_char_function(e, phi0, jump, y, n, samples, SeededStream(seed, 0));
        return py::make_tuple(r.mean, r.standard_error);
      },
      py::arg("ensemble"), py::arg("phi0"), py::arg("jump"), py::arg("y"), py::arg("n"), py::arg("samples"),
      py::arg("seed") = 0, "Monte Carlo estimate of the averaged characteristic function and its standard error.");

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config, const std::string& out, std::optional<int> n,
         std::optional<std::size_t> samples, std::optional<std::uint64_t> seed, std::optional<int> grid,
         bool enumerate, const std::string& which) {
        CliOptions opts;
        opts.n = n;
        opts.samples = samples;
        opts.seed = seed;
        opts.grid = grid;
        opts.out = out;
        opts.enumerate = enumerate;
        opts.which = which;
        std::ostringstream err;
        const int code = run_command(command, config, opts, err);
        return py::make_tuple(code, err.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = ".", py::arg("n") = py::none(),
      py::arg("samples") = py::none(), py::arg("seed") = py::none(), py::arg("grid") = py::none(),
      py::arg("enumerate") = false, py::arg("which") = "md",
      "Runs a CLI command; returns (exit code, messages).");
}
