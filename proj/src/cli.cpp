#include "rtqw/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "rtqw/markov.hpp"
#include "rtqw/mc.hpp"
#include "rtqw/rates.hpp"

namespace rtqw {

using nlohmann::json;

namespace {

// Rows whose weight and standard error are both below this are not written.
constexpr double kSupportTol = 1e-14;

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(const std::vector<std::string>& cells) { rows_.push_back(cells); }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> indexed(const std::string& stem, int d) {
  std::vector<std::string> v;
  for (int j = 1; j <= d; ++j) v.push_back(stem + "_" + std::to_string(j));
  return v;
}

std::vector<std::string> indexed2(const std::string& stem, int d) {
  std::vector<std::string> v;
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) v.push_back(stem + "_" + std::to_string(i) + "_" + std::to_string(j));
  return v;
}

void append(std::vector<std::string>& cells, const RVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) cells.push_back(format_double(v[i]));
}

void append(std::vector<std::string>& cells, const RMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) cells.push_back(format_double(m(i, j)));
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

std::filesystem::path prepare(const CliOptions& opts) {
  std::filesystem::path out(opts.out);
  std::filesystem::create_directories(out);
  return out;
}

CommandResult finish(const std::string& command, const ModelConfig& cfg, std::uint64_t seed, json outputs,
                     const std::filesystem::path& dir, std::vector<std::string> files, int exit_code) {
  CommandResult res;
  res.exit_code = exit_code;
  res.record = to_json(ResultRecord{command, cfg.digest, seed, std::move(outputs)});
  const auto path = dir / (command + ".json");
  std::ofstream(path) << res.record.dump(2) << '\n';
  files.push_back(path.string());
  res.files = std::move(files);
  return res;
}

struct Moments {
  double total = 0.0;
  RVector mean;
  RMatrix centred;  // about n rbar, divided by n
};

Moments summarize(const LatticeBox& box, const std::vector<double>& w, int n, const RVector& rbar) {
  const int d = box.dim();
  Moments m{0.0, RVector::Zero(d), RMatrix::Zero(d, d)};
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Site k = box.site(i);
    RVector x(d), c(d);
    for (int j = 0; j < d; ++j) {
      x[j] = k[j];
      c[j] = k[j] - n * rbar[j];
    }
    m.total += w[i];
    m.mean += w[i] * x;
    m.centred += w[i] * c * c.transpose();
  }
  if (n > 0) m.centred /= n;
  return m;
}

bool all_permutation(const ModelConfig& cfg) {
  for (const auto& c : cfg.coins)
    if (!as_permutation_coin(c)) return false;
  return true;
}

SpectralModel spectral_model_of(const ModelConfig& cfg) {
  return cfg.kind == EnsembleKind::Markov ? markov_spectral_model(cfg.process(), cfg.jump)
                                          : iid_model(cfg.ensemble(), cfg.jump);
}

const CVector& require_state(const ModelConfig& cfg, const char* command) {
  if (cfg.rho0) throw ConfigError({std::string("initial_state.density: not supported by ") + command});
  return cfg.phi0;
}

}  // namespace

CommandResult cmd_simulate(const ModelConfig& cfg, const CliOptions& opts) {
  const auto dir = prepare(opts);
  const int d = cfg.dim;
  const RVector rbar = cfg.jump.mean();
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  int n = opts.n.value_or(cfg.n);
  std::string mode;
  LatticeBox box;
  std::vector<double> weight, stderr_;
  json extra = json::object();

  auto take = [&](const LatticeDistribution& dist) {
    box = dist.box();
    weight = dist.weights();
  };

  if (!cfg.sequence.empty()) {
    mode = "sequence";
    n = static_cast<int>(cfg.sequence.size());
    std::vector<Coin> coins;
    for (int s : cfg.sequence) coins.push_back(cfg.coins[s]);
    if (cfg.rho0)
      take(density_distribution(*cfg.rho0, coins, cfg.jump));
    else
      take(position_distribution(evolve(WalkState::localized(cfg.phi0, Site(d, 0)), coins, cfg.jump)));
  } else if (opts.enumerate) {
    mode = "enumerate";
    const auto paths = cfg.kind == EnsembleKind::Markov ? enumerate_paths(cfg.process(), n)
                                                        : enumerate_sequences(cfg.ensemble(), n);
    std::map<Site, double> acc;
    for (const auto& path : paths) {
      std::vector<Coin> coins;
      for (int s : path.indices) coins.push_back(cfg.coins[s]);
      const LatticeDistribution w =
          cfg.rho0 ? density_distribution(*cfg.rho0, coins, cfg.jump)
                   : position_distribution(evolve(WalkState::localized(cfg.phi0, Site(d, 0)), coins, cfg.jump));
      w.for_each([&](const Site& k, double p) { acc[k] += path.probability * p; });
    }
    take(LatticeDistribution::from_map(d, acc));
    extra["paths"] = paths.size();
  } else if (opts.samples) {
    mode = "monte_carlo";
    const CVector& phi0 = require_state(cfg, "simulate --samples");
    const SeededStream stream(seed, 0);
    const McDistribution mc = cfg.kind == EnsembleKind::Markov
                                  ? mc_averaged_distribution(cfg.process(), phi0, cfg.jump, n, *opts.samples, stream)
                                  : mc_averaged_distribution(cfg.ensemble(), phi0, cfg.jump, n, *opts.samples, stream);
    box = mc.box;
    weight = mc.mean;
    stderr_ = mc.standard_error;
    extra["samples"] = *opts.samples;
  } else {
    mode = "spectral";
    if (cfg.kind == EnsembleKind::Markov)
      take(averaged_distribution_markov(cfg.process(), cfg.jump, n, require_state(cfg, "Markov simulate")));
    else if (cfg.rho0)
      take(averaged_distribution(expected_doubled(cfg.ensemble()), cfg.jump, n, *cfg.rho0));
    else
      take(averaged_distribution(expected_doubled(cfg.ensemble()), cfg.jump, n, cfg.phi0));
  }

  std::vector<std::string> header = indexed("k", d);
  header.push_back("weight");
  if (!stderr_.empty()) header.push_back("stderr");
  Csv csv(header);
  for (std::size_t i = 0; i < weight.size(); ++i) {
    const double se = stderr_.empty() ? 0.0 : stderr_[i];
    if (std::abs(weight[i]) <= kSupportTol && se <= kSupportTol) continue;
    std::vector<std::string> cells;
    for (int k : box.site(i)) cells.push_back(std::to_string(k));
    cells.push_back(format_double(weight[i]));
    if (!stderr_.empty()) cells.push_back(format_double(se));
    csv.row(cells);
  }
  const auto csv_path = dir / "simulate.csv";
  csv.write(csv_path);

  const Moments m = summarize(box, weight, n, rbar);
  json outputs = {{"mode", mode},
                  {"n", n},
                  {"total", m.total},
                  {"mean", to_json(m.mean)},
                  {"centred_second_moment_over_n", to_json(m.centred)},
                  {"drift", to_json(rbar)},
                  {"mean_over_n_minus_drift", to_json(RVector(n > 0 ? RVector(m.mean / n - rbar) : RVector(-rbar)))}};
  outputs.update(extra);
  return finish("simulate", cfg, seed, outputs, dir, {csv_path.string()}, kExitOk);
}

CommandResult cmd_spectral(const ModelConfig& cfg, const CliOptions& opts) {
  const auto dir = prepare(opts);
  const int d = cfg.dim;
  const SpectralModel model = spectral_model_of(cfg);
  const CyclicSubspace sub = cyclic_subspace(model);
  const AssumptionReport rep = check_assumption(model, sub, cfg.assumption);

  json offending = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.offending_v.size(), 16); ++i)
    offending.push_back(to_json(rep.offending_v[i]));
  json outputs = {{"assumption",
                   {{"holds", rep.holds},
                    {"gap", rep.gap},
                    {"simplicity_margin", number_or_string(rep.simplicity_margin)},
                    {"degeneracy", rep.degeneracy},
                    {"full_space_degeneracy", rep.full_space_degeneracy},
                    {"grid", rep.grid},
                    {"offending_count", rep.offending_v.size()},
                    {"offending_v", offending}}},
                  {"cyclic_subspace",
                   {{"rank", sub.rank},
                    {"ambient", model.ambient()},
                    {"invariance_residual", sub.invariance_residual},
                    {"seed_residual", sub.seed_residual}}},
                  {"drift", to_json(model.drift)}};
  if (cfg.kind == EnsembleKind::Markov) {
    const ProjectorCheck pc = projector_check(model, cfg.jump.coin_dim());
    outputs["projector"] = {{"pairing", to_json(pc.pairing)},
                            {"idempotence_residual_1_over_2d", pc.residual_half_d},
                            {"idempotence_residual_1_over_d", pc.residual_d},
                            {"fixed_point_residual", pc.fixed_point}};
  }

  std::vector<std::string> files;
  if (rep.holds) {
    const int grid = opts.grid.value_or(cfg.diffusion_grid);
    const DiffusionReport dr = diffusion_report(model, sub, grid, true);
    json samples = json::array();
    Csv csv(concat(indexed("v", d), indexed2("D", d)));
    for (std::size_t i = 0; i < dr.v.size(); ++i) {
      samples.push_back({{"v", to_json(dr.v[i])}, {"D", to_json(dr.d[i])}});
      std::vector<std::string> cells;
      append(cells, dr.v[i]);
      append(cells, dr.d[i]);
      csv.row(cells);
    }
    const auto csv_path = dir / "diffusion.csv";
    csv.write(csv_path);
    files.push_back(csv_path.string());
    outputs["diffusion"] = {{"grid", dr.grid},
                            {"method", dr.method},
                            {"averaged", to_json(dr.averaged)},
                            {"method_residual", dr.method_residual},
                            {"v_spread", dr.v_spread},
                            {"v_independent", dr.v_independent},
                            {"min_eigenvalue", dr.min_eigenvalue},
                            {"max_asymmetry", dr.max_asymmetry},
                            {"samples", samples}};
    if (cfg.kind != EnsembleKind::Markov && all_permutation(cfg)) {
      const ChainCovariance cc = chain_covariance(cfg.chain());
      outputs["chain"] = {{"sigma", to_json(cc.sigma)},
                          {"alternative_form_agreement", cc.form_agreement},
                          {"singular", cc.singular},
                          {"period", cc.period},
                          {"sigma_minus_averaged_diffusion", (cc.sigma - dr.averaged).cwiseAbs().maxCoeff()}};
    } else if (cfg.kind == EnsembleKind::Markov && all_permutation(cfg)) {
      const RMatrix sigma = permutation_markov_covariance(cfg.process(), cfg.jump);
      outputs["chain"] = {{"sigma", to_json(sigma)},
                          {"sigma_minus_averaged_diffusion", (sigma - dr.averaged).cwiseAbs().maxCoeff()}};
    }
  }
  return finish("spectral", cfg, cfg.seed, outputs, dir, files, rep.holds ? kExitOk : kExitAssumption);
}

CommandResult cmd_rates(const ModelConfig& cfg, const CliOptions& opts) {
  const auto dir = prepare(opts);
  const int d = cfg.dim;
  std::vector<RVector> xs = cfg.rate_x;
  if (xs.empty()) {
    if (d != 1) throw ConfigError({"rates.x: required when the dimension exceeds 1"});
    for (int i = 0; i <= 32; ++i) xs.push_back(RVector::Constant(1, -1.0 + i / 16.0));
  }
  RateTable table;
  json outputs = {{"which", opts.which}};
  std::vector<std::string> header = indexed("x", d);
  header.push_back("rate");
  if (opts.which == "ld") {
    const ChainModel chain = cfg.chain();
    table = ld_table(chain, xs);
    header = concat(header, indexed("lambda", d));
    outputs["drift"] = to_json(cfg.jump.mean());
  } else if (opts.which == "md") {
    const SpectralModel model = spectral_model_of(cfg);
    const CyclicSubspace sub = cyclic_subspace(model);
    ArgmaxOptions ao;
    ao.grid = opts.grid.value_or(cfg.argmax_grid);
    const DiffusionFamily family{d, [&](const RVector& v) { return diffusion_matrix(model, sub, v); }};
    const MdRate md(family, ao);
    table = md_table(family, xs, ao);
    header = concat(concat(header, indexed("y", d)), indexed("v1", d));
    outputs["constant_family"] = md.constant();
  } else {
    throw ConfigError({"--which: must be 'md' or 'ld'"});
  }
  header.push_back("status");

  Csv csv(header);
  json rows = json::array();
  bool indeterminate = false;
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    std::vector<std::string> cells;
    append(cells, table.x[i]);
    cells.push_back(format_double(table.rate[i]));
    append(cells, table.maximizer[i]);
    if (opts.which == "md") append(cells, table.v1[i]);
    cells.push_back(to_string(table.status[i]));
    csv.row(cells);
    indeterminate = indeterminate || table.status[i] == RateStatus::Indeterminate;
    rows.push_back({{"x", to_json(table.x[i])}, {"rate", number_or_string(table.rate[i])},
                    {"status", to_string(table.status[i])}});
  }
  const auto csv_path = dir / ("rates_" + opts.which + ".csv");
  csv.write(csv_path);
  outputs["rows"] = rows;
  if (d == 1) outputs["midpoint_convex"] = midpoint_convex(table.rate);
  return finish("rates", cfg, cfg.seed, outputs, dir, {csv_path.string()},
                indeterminate ? kExitConvergence : kExitOk);
}

CommandResult cmd_mc(const ModelConfig& cfg, const CliOptions& opts) {
  const auto dir = prepare(opts);
  const int d = cfg.dim;
  const CVector& phi0 = require_state(cfg, "mc");
  std::vector<int> n_list = opts.n ? std::vector<int>{*opts.n} : cfg.n_list;
  if (n_list.empty()) n_list = {cfg.n};
  const std::size_t samples = opts.samples.value_or(cfg.samples > 0 ? cfg.samples : 1000);
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  const SeededStream stream(seed, 0);
  const auto rows = cfg.kind == EnsembleKind::Markov
                        ? mc_moment_scaling(cfg.process(), phi0, cfg.jump, n_list, samples, stream)
                        : mc_moment_scaling(cfg.ensemble(), phi0, cfg.jump, n_list, samples, stream);

  json outputs = {{"samples", samples}, {"stream", 0}, {"workers", worker_count()}};
  std::optional<RMatrix> target;
  try {
    const SpectralModel model = spectral_model_of(cfg);
    target = averaged_diffusion(model, cyclic_subspace(model), opts.grid.value_or(cfg.diffusion_grid));
    outputs["target_diffusion"] = to_json(*target);
  } catch (const AssumptionError& e) {
    outputs["target_diffusion"] = nullptr;
    outputs["target_note"] = e.what();
  }

  Csv csv(concat(concat(concat(concat({"n"}, indexed("first", d)), indexed("first_se", d)), indexed2("second", d)),
                 indexed2("second_se", d)));
  json table = json::array();
  for (const auto& r : rows) {
    std::vector<std::string> cells{std::to_string(r.n)};
    append(cells, r.first);
    append(cells, r.first_se);
    append(cells, r.second);
    append(cells, r.second_se);
    csv.row(cells);
    json row = {{"n", r.n},
                {"first", to_json(r.first)},
                {"first_se", to_json(r.first_se)},
                {"second", to_json(r.second)},
                {"second_se", to_json(r.second_se)}};
    if (target) {
      RMatrix z = (r.second - *target).cwiseQuotient(r.second_se);
      row["second_z"] = to_json(z);
    }
    table.push_back(row);
  }
  const auto csv_path = dir / "mc.csv";
  csv.write(csv_path);
  outputs["rows"] = table;
  return finish("mc", cfg, seed, outputs, dir, {csv_path.string()}, kExitOk);
}

int run_command(const std::string& command, const std::string& config_path, const CliOptions& opts,
                std::ostream& err) {
  try {
    const ModelConfig cfg = load_config(config_path);
    CommandResult res;
    if (command == "simulate")
      res = cmd_simulate(cfg, opts);
    else if (command == "spectral")
      res = cmd_spectral(cfg, opts);
    else if (command == "rates")
      res = cmd_rates(cfg, opts);
    else if (command == "mc")
      res = cmd_mc(cfg, opts);
    else
      throw ConfigError({"command: unknown command '" + command + "'"});
    if (res.exit_code == kExitAssumption) err << "assumption check failed; report written\n";
    if (res.exit_code == kExitConvergence) err << "some rate evaluations did not converge\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) err << "config error: " << p << '\n';
    return kExitConfig;
  } catch (const AssumptionError& e) {
    err << "assumption failure: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::length_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace rtqw
