#include "rtqw/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace rtqw {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += (s.empty() ? "" : "\n") + p;
  return s;
}

// Collects per-field problems instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  bool number(const json& j, const std::string& path, double& out) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return false;
    }
    out = j.get<double>();
    return true;
  }

  bool integer(const json& j, const std::string& path, long long& out) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return false;
    }
    out = j.get<long long>();
    return true;
  }

  bool complex(const json& j, const std::string& path, cplx& out) {
    if (j.is_number()) {
      out = cplx(j.get<double>(), 0.0);
      return true;
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
      out = cplx(j[0].get<double>(), j[1].get<double>());
      return true;
    }
    fail(path, "expected a number or [re, im]");
    return false;
  }

  bool real_vector(const json& j, const std::string& path, std::vector<double>& out) {
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return false;
    }
    out.clear();
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      double x = 0.0;
      ok = number(j[i], path + "[" + std::to_string(i) + "]", x) && ok;
      out.push_back(x);
    }
    return ok;
  }

  bool int_vector(const json& j, const std::string& path, std::vector<int>& out) {
    if (!j.is_array()) {
      fail(path, "expected an array of integers");
      return false;
    }
    out.clear();
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      long long x = 0;
      ok = integer(j[i], path + "[" + std::to_string(i) + "]", x) && ok;
      out.push_back(static_cast<int>(x));
    }
    return ok;
  }

  bool complex_matrix(const json& j, const std::string& path, CMatrix& out) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
      fail(path, "expected a nested array (rows of entries)");
      return false;
    }
    const auto rows = j.size(), cols = j[0].size();
    out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    bool ok = true;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        fail(path + "[" + std::to_string(r) + "]", "rows must have equal length");
        return false;
      }
      for (std::size_t c = 0; c < cols; ++c) {
        cplx z;
        ok = complex(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", z) && ok;
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z;
      }
    }
    return ok;
  }

  bool real_matrix(const json& j, const std::string& path, RMatrix& out) {
    CMatrix c;
    if (!complex_matrix(j, path, c)) return false;
    if (c.imag().cwiseAbs().maxCoeff() != 0.0) {
      fail(path, "expected real entries");
      return false;
    }
    out = c.real();
    return true;
  }
};

std::optional<Coin> parse_coin(Reader& rd, const json& j, const std::string& path, int dim) {
  const int cd = 2 * dim;
  try {
    std::string name;
    if (j.is_string()) name = j.get<std::string>();
    if (j.is_object() && j.contains("name")) {
      if (!j["name"].is_string()) {
        rd.fail(path + ".name", "expected a string");
        return std::nullopt;
      }
      name = j["name"].get<std::string>();
    }
    if (!name.empty()) {
      if (name == "identity") return Coin::identity(cd);
      if (name == "grover") return Coin::grover(cd);
      if (name == "hadamard") {
        if (dim != 1) {
          rd.fail(path, "the hadamard coin needs dimension 1");
          return std::nullopt;
        }
        return Coin::hadamard();
      }
      if (name == "swap") {
        PermutationCoinSpec spec;
        for (int t = 0; t < cd; ++t) spec.images.push_back((t + dim) % cd);
        return make_permutation_coin(spec);
      }
      rd.fail(path, "unknown coin name '" + name + "'");
      return std::nullopt;
    }
    if (j.is_object() && j.contains("matrix")) {
      CMatrix m;
      if (!rd.complex_matrix(j["matrix"], path + ".matrix", m)) return std::nullopt;
      if (m.rows() != cd || m.cols() != cd) {
        rd.fail(path + ".matrix", "coin must be " + std::to_string(cd) + " x " + std::to_string(cd));
        return std::nullopt;
      }
      return Coin(m);
    }
    if (j.is_object() && j.contains("permutation")) {
      PermutationCoinSpec spec;
      if (!rd.int_vector(j["permutation"], path + ".permutation", spec.images)) return std::nullopt;
      if (static_cast<int>(spec.images.size()) != cd) {
        rd.fail(path + ".permutation", "needs " + std::to_string(cd) + " images");
        return std::nullopt;
      }
      if (j.contains("phases") && !rd.real_vector(j["phases"], path + ".phases", spec.phases)) return std::nullopt;
      return make_permutation_coin(spec);
    }
    rd.fail(path, "expected a coin name or an object with 'name', 'matrix' or 'permutation'");
  } catch (const std::invalid_argument& e) {
    rd.fail(path, e.what());
  }
  return std::nullopt;
}

void parse_jumps(Reader& rd, const json& j, ModelConfig& cfg) {
  const int d = cfg.dim, cd = 2 * d;
  std::vector<Site> jumps(cd);
  std::vector<bool> seen(cd, false);
  auto read_site = [&](const json& v, const std::string& path, int t) {
    std::vector<int> s;
    if (!rd.int_vector(v, path, s)) return;
    if (static_cast<int>(s.size()) != d) {
      rd.fail(path, "jump vector must have " + std::to_string(d) + " components");
      return;
    }
    jumps[t] = s;
    seen[t] = true;
  };
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != cd) {
      rd.fail("jumps", "needs " + std::to_string(cd) + " vectors in the order +1..+d, -1..-d");
      return;
    }
    for (int t = 0; t < cd; ++t) read_site(j[t], "jumps[" + std::to_string(t) + "]", t);
  } else if (j.is_object()) {
    for (const auto& [key, v] : j.items()) {
      int label = 0;
      try {
        std::size_t used = 0;
        label = std::stoi(key, &used);
        if (used != key.size()) label = 0;
      } catch (const std::exception&) {
        label = 0;
      }
      if (label == 0 || std::abs(label) > d) {
        rd.fail("jumps." + key, "label must be one of +1..+d, -1..-d");
        continue;
      }
      read_site(v, "jumps." + key, index_of(label, d));
    }
  } else {
    rd.fail("jumps", "expected an array or an object keyed by label");
    return;
  }
  for (int t = 0; t < cd; ++t)
    if (!seen[t]) {
      rd.fail("jumps", "missing jump for label " + std::to_string(label_of(t, d)));
      return;
    }
  try {
    cfg.jump = JumpFunction(d, jumps);
  } catch (const std::invalid_argument& e) {
    rd.fail("jumps", e.what());
  }
}

void check_probabilities(Reader& rd, const std::vector<double>& p, const std::string& path) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) rd.fail(path + "[" + std::to_string(i) + "]", "probability must be nonnegative");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) rd.fail(path, "probabilities must sum to 1 (got " + format_double(sum) + ")");
}

void parse_ensemble(Reader& rd, const json& j, ModelConfig& cfg) {
  if (!j.is_object()) {
    rd.fail("ensemble", "expected an object");
    return;
  }
  const std::string type = j.value("type", std::string("iid"));
  if (type == "iid")
    cfg.kind = EnsembleKind::Iid;
  else if (type == "permutation")
    cfg.kind = EnsembleKind::Permutation;
  else if (type == "markov")
    cfg.kind = EnsembleKind::Markov;
  else {
    rd.fail("ensemble.type", "must be 'iid', 'permutation' or 'markov'");
    return;
  }

  if (cfg.kind == EnsembleKind::Permutation && j.contains("permutations")) {
    const json& perms = j["permutations"];
    if (!perms.is_array() || perms.empty()) {
      rd.fail("ensemble.permutations", "expected a non-empty array");
      return;
    }
    for (std::size_t i = 0; i < perms.size(); ++i) {
      const std::string path = "ensemble.permutations[" + std::to_string(i) + "]";
      if (!perms[i].is_object()) {
        rd.fail(path, "expected an object with 'images' and 'probability'");
        continue;
      }
      PermutationCoinSpec spec;
      double prob = 0.0;
      bool ok = perms[i].contains("images") && rd.int_vector(perms[i]["images"], path + ".images", spec.images);
      if (!perms[i].contains("images")) rd.fail(path + ".images", "missing");
      if (perms[i].contains("phases")) ok = rd.real_vector(perms[i]["phases"], path + ".phases", spec.phases) && ok;
      if (!perms[i].contains("probability"))
        rd.fail(path + ".probability", "missing"), ok = false;
      else
        ok = rd.number(perms[i]["probability"], path + ".probability", prob) && ok;
      if (!ok) continue;
      try {
        if (static_cast<int>(spec.images.size()) != 2 * cfg.dim)
          throw std::invalid_argument("needs " + std::to_string(2 * cfg.dim) + " images");
        cfg.coins.push_back(make_permutation_coin(spec));
        cfg.probs.push_back(prob);
      } catch (const std::invalid_argument& e) {
        rd.fail(path, e.what());
      }
    }
    check_probabilities(rd, cfg.probs, "ensemble.permutations[*].probability");
    return;
  }

  if (!j.contains("coins") || !j["coins"].is_array() || j["coins"].empty()) {
    rd.fail("ensemble.coins", "expected a non-empty array");
    return;
  }
  bool coins_ok = true;
  for (std::size_t i = 0; i < j["coins"].size(); ++i) {
    auto c = parse_coin(rd, j["coins"][i], "ensemble.coins[" + std::to_string(i) + "]", cfg.dim);
    if (c)
      cfg.coins.push_back(*c);
    else
      coins_ok = false;
  }
  const auto f = static_cast<Eigen::Index>(j["coins"].size());

  if (cfg.kind == EnsembleKind::Markov) {
    if (!j.contains("transition")) {
      rd.fail("ensemble.transition", "missing");
    } else if (rd.real_matrix(j["transition"], "ensemble.transition", cfg.transition)) {
      if (cfg.transition.rows() != f || cfg.transition.cols() != f)
        rd.fail("ensemble.transition", "must be " + std::to_string(f) + " x " + std::to_string(f));
      else
        for (Eigen::Index r = 0; r < f; ++r) {
          std::vector<double> row(cfg.transition.row(r).begin(), cfg.transition.row(r).end());
          check_probabilities(rd, row, "ensemble.transition[" + std::to_string(r) + "]");
        }
    }
    std::vector<double> init;
    if (!j.contains("initial")) {
      rd.fail("ensemble.initial", "missing");
    } else if (rd.real_vector(j["initial"], "ensemble.initial", init)) {
      if (static_cast<Eigen::Index>(init.size()) != f)
        rd.fail("ensemble.initial", "must have " + std::to_string(f) + " entries");
      else
        check_probabilities(rd, init, "ensemble.initial");
      cfg.markov_initial = Eigen::Map<RVector>(init.data(), static_cast<Eigen::Index>(init.size()));
    }
    return;
  }

  if (!j.contains("probabilities")) {
    if (f == 1)
      cfg.probs = {1.0};
    else
      rd.fail("ensemble.probabilities", "missing");
  } else if (rd.real_vector(j["probabilities"], "ensemble.probabilities", cfg.probs)) {
    if (static_cast<Eigen::Index>(cfg.probs.size()) != f)
      rd.fail("ensemble.probabilities", "must have one entry per coin");
    else
      check_probabilities(rd, cfg.probs, "ensemble.probabilities");
  }
  if (cfg.kind == EnsembleKind::Permutation && coins_ok)
    for (std::size_t i = 0; i < cfg.coins.size(); ++i)
      if (!as_permutation_coin(cfg.coins[i]))
        rd.fail("ensemble.coins[" + std::to_string(i) + "]", "permutation ensembles need permutation-phase coins");
}

void parse_initial(Reader& rd, const json& j, ModelConfig& cfg) {
  const int cd = 2 * cfg.dim;
  if (!j.is_object()) {
    rd.fail("initial_state", "expected an object with 'amplitudes' or 'density'");
    return;
  }
  if (j.contains("amplitudes")) {
    const json& a = j["amplitudes"];
    if (!a.is_array() || static_cast<int>(a.size()) != cd) {
      rd.fail("initial_state.amplitudes", "needs " + std::to_string(cd) + " entries");
      return;
    }
    CVector phi(cd);
    bool ok = true;
    for (int t = 0; t < cd; ++t)
      ok = rd.complex(a[t], "initial_state.amplitudes[" + std::to_string(t) + "]", phi[t]) && ok;
    if (!ok) return;
    if (std::abs(phi.squaredNorm() - 1.0) > 1e-12) {
      rd.fail("initial_state.amplitudes", "state is not normalized (norm^2 = " + format_double(phi.squaredNorm()) + ")");
      return;
    }
    cfg.phi0 = phi;
    return;
  }
  if (j.contains("density")) {
    const json& e = j["density"];
    if (!e.is_array() || e.empty()) {
      rd.fail("initial_state.density", "expected a non-empty array of {x, y, block}");
      return;
    }
    DensityKernel k;
    k.dim = cfg.dim;
    bool ok = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string path = "initial_state.density[" + std::to_string(i) + "]";
      DensityKernel::Entry en;
      if (!e[i].is_object() || !e[i].contains("x") || !e[i].contains("y") || !e[i].contains("block")) {
        rd.fail(path, "expected an object with 'x', 'y' and 'block'");
        ok = false;
        continue;
      }
      ok = rd.int_vector(e[i]["x"], path + ".x", en.x) && ok;
      ok = rd.int_vector(e[i]["y"], path + ".y", en.y) && ok;
      ok = rd.complex_matrix(e[i]["block"], path + ".block", en.block) && ok;
      k.entries.push_back(en);
    }
    if (!ok) return;
    try {
      k.validate();
      cfg.rho0 = k;
    } catch (const std::invalid_argument& ex) {
      rd.fail("initial_state.density", ex.what());
    }
    return;
  }
  rd.fail("initial_state", "expected 'amplitudes' or 'density'");
}

void parse_rates(Reader& rd, const json& j, ModelConfig& cfg) {
  if (!j.is_object() || !j.contains("x")) {
    rd.fail("rates", "expected an object with 'x'");
    return;
  }
  const json& x = j["x"];
  if (x.is_object()) {
    double from = 0.0, to = 0.0;
    long long count = 0;
    bool ok = x.contains("from") && rd.number(x["from"], "rates.x.from", from);
    ok = x.contains("to") && rd.number(x["to"], "rates.x.to", to) && ok;
    ok = x.contains("count") && rd.integer(x["count"], "rates.x.count", count) && ok;
    if (!ok || count < 1 || cfg.dim != 1) {
      rd.fail("rates.x", "range form needs from, to, count >= 1 and dimension 1");
      return;
    }
    for (long long i = 0; i < count; ++i) {
      RVector v(1);
      v[0] = count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
      cfg.rate_x.push_back(v);
    }
    return;
  }
  if (!x.is_array()) {
    rd.fail("rates.x", "expected an array or {from, to, count}");
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::string path = "rates.x[" + std::to_string(i) + "]";
    std::vector<double> v;
    if (x[i].is_number()) {
      v = {x[i].get<double>()};
    } else if (!rd.real_vector(x[i], path, v)) {
      continue;
    }
    if (static_cast<int>(v.size()) != cfg.dim) {
      rd.fail(path, "point must have " + std::to_string(cfg.dim) + " components");
      continue;
    }
    cfg.rate_x.push_back(Eigen::Map<RVector>(v.data(), cfg.dim));
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

ModelConfig parse_config(const json& j) {
  Reader rd;
  ModelConfig cfg;
  if (!j.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  static const std::set<std::string> known{"dimension", "jumps",  "ensemble", "initial_state", "tolerances",
                                           "grids",     "seed",   "n",        "samples",       "n_list",
                                           "sequence",  "rates",  "name",     "description"};
  for (const auto& [key, v] : j.items())
    if (!known.count(key)) rd.fail(key, "unknown field");

  long long dim = 1;
  if (j.contains("dimension") && rd.integer(j["dimension"], "dimension", dim) && dim < 1)
    rd.fail("dimension", "must be at least 1");
  cfg.dim = static_cast<int>(std::max(1LL, dim));
  cfg.jump = JumpFunction::nearest_neighbour(cfg.dim);
  if (j.contains("jumps")) parse_jumps(rd, j["jumps"], cfg);

  if (!j.contains("ensemble"))
    rd.fail("ensemble", "missing");
  else
    parse_ensemble(rd, j["ensemble"], cfg);

  if (j.contains("initial_state")) {
    parse_initial(rd, j["initial_state"], cfg);
  } else {
    cfg.phi0 = CVector::Zero(2 * cfg.dim);
    cfg.phi0[0] = 1.0;
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) rd.fail("tolerances", "expected an object");
    for (const auto& [key, target] :
         {std::pair{"gap", &cfg.assumption.gap_tol}, std::pair{"one", &cfg.assumption.one_tol},
          std::pair{"degeneracy", &cfg.assumption.degeneracy_tol}, std::pair{"ks_alpha", &cfg.ks_alpha}})
      if (t.is_object() && t.contains(key) && rd.number(t[key], std::string("tolerances.") + key, *target) &&
          !(*target > 0.0))
        rd.fail(std::string("tolerances.") + key, "must be positive");
    if (!(cfg.ks_alpha < 1.0)) rd.fail("tolerances.ks_alpha", "must be below 1");
  }
  if (j.contains("grids")) {
    const json& g = j["grids"];
    if (!g.is_object()) rd.fail("grids", "expected an object");
    for (const auto& [key, target] : {std::pair{"assumption", &cfg.assumption.grid}, std::pair{"diffusion", &cfg.diffusion_grid},
                                      std::pair{"quadrature", &cfg.quadrature_grid}, std::pair{"argmax", &cfg.argmax_grid}}) {
      long long v = 0;
      if (g.is_object() && g.contains(key) && rd.integer(g[key], std::string("grids.") + key, v)) {
        if (v < 0) rd.fail(std::string("grids.") + key, "must be nonnegative");
        *target = static_cast<int>(v);
      }
    }
    if (cfg.diffusion_grid < 1) rd.fail("grids.diffusion", "must be positive");
  }
  if (j.contains("seed")) {
    if (j["seed"].is_number_unsigned() || (j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      cfg.seed = j["seed"].get<std::uint64_t>();
    else
      rd.fail("seed", "expected a nonnegative integer");
  }
  long long v = 0;
  if (j.contains("n") && rd.integer(j["n"], "n", v)) {
    if (v < 0) rd.fail("n", "must be nonnegative");
    cfg.n = static_cast<int>(v);
  }
  if (j.contains("samples") && rd.integer(j["samples"], "samples", v)) {
    if (v < 2) rd.fail("samples", "must be at least 2");
    cfg.samples = static_cast<std::size_t>(std::max(0LL, v));
  }
  if (j.contains("n_list") && rd.int_vector(j["n_list"], "n_list", cfg.n_list))
    for (int n : cfg.n_list)
      if (n < 1) rd.fail("n_list", "entries must be positive");
  if (j.contains("sequence") && rd.int_vector(j["sequence"], "sequence", cfg.sequence))
    for (int s : cfg.sequence)
      if (s < 0 || s >= static_cast<int>(cfg.coins.size())) rd.fail("sequence", "coin index out of range");
  if (j.contains("rates")) parse_rates(rd, j["rates"], cfg);

  if (!rd.problems.empty()) throw ConfigError(rd.problems);
  cfg.source = j;
  cfg.digest = config_digest(j);
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what()});
  }
  return parse_config(j);
}

FiniteCoinEnsemble ModelConfig::ensemble() const {
  if (kind == EnsembleKind::Markov) throw ConfigError({"ensemble.type: this command needs an i.i.d. ensemble"});
  return FiniteCoinEnsemble(coins, probs);
}

MarkovCoinProcess ModelConfig::process() const {
  if (kind == EnsembleKind::Markov) return MarkovCoinProcess(coins, transition, markov_initial);
  return MarkovCoinProcess::iid(ensemble());
}

PermutationMeasure ModelConfig::measure() const {
  try {
    return marginal_permutation_measure(ensemble());
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("ensemble.coins: ") + e.what()});
  }
}

ChainModel ModelConfig::chain() const {
  RVector p0;
  if (rho0) {
    p0 = RVector::Zero(2 * dim);
    for (const auto& en : rho0->entries)
      if (en.x == en.y) p0 += en.block.diagonal().real();
  } else {
    p0 = initial_from_state(phi0);
  }
  return build_chain(measure(), jump, p0);
}

std::string config_digest(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const RMatrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(RVector(m.row(r).transpose())));
  return a;
}

json to_json(const CMatrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    a.push_back(row);
  }
  return a;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json to_json(const ResultRecord& r) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return json{{"command", r.command},   {"config_digest", r.config_digest}, {"version", RTQW_VERSION},
              {"timestamp", stamp},     {"seed", r.seed},                   {"outputs", r.outputs}};
}

void validate_record(const json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  for (const char* key : {"command", "config_digest", "version", "timestamp"})
    if (!j.contains(key) || !j[key].is_string()) problems.push_back(std::string(key) + ": missing or not a string");
  if (!j.contains("seed") || !j["seed"].is_number_integer()) problems.push_back("seed: missing or not an integer");
  if (!j.contains("outputs") || !j["outputs"].is_object()) problems.push_back("outputs: missing or not an object");
  if (!problems.empty()) throw ConfigError(problems);
}

}  // namespace rtqw
