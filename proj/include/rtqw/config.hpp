#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rtqw/chain.hpp"
#include "rtqw/spectral.hpp"

namespace rtqw {

// Validation failure; one message per offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class EnsembleKind { Iid, Permutation, Markov };

struct ModelConfig {
  int dim = 1;
  JumpFunction jump = JumpFunction::nearest_neighbour(1);
  EnsembleKind kind = EnsembleKind::Iid;
  std::vector<Coin> coins;
  std::vector<double> probs;  // i.i.d. and permutation ensembles
  RMatrix transition;         // Markov only
  RVector markov_initial;     // Markov only
  CVector phi0;               // empty when a density kernel is given
  std::optional<DensityKernel> rho0;
  AssumptionOptions assumption;
  int diffusion_grid = 64;
  int quadrature_grid = 0;
  int argmax_grid = 0;
  double ks_alpha = 1e-4;
  std::uint64_t seed = 0;
  int n = 10;
  std::size_t samples = 0;
  std::vector<int> n_list;
  std::vector<int> sequence;
  std::vector<RVector> rate_x;
  nlohmann::json source;
  std::string digest;

  FiniteCoinEnsemble ensemble() const;  // i.i.d. and permutation kinds
  MarkovCoinProcess process() const;    // any kind; i.i.d. kinds are embedded
  PermutationMeasure measure() const;   // every coin must be a permutation coin
  // Initial coin law from phi0, or from the diagonal blocks of rho0.
  ChainModel chain() const;
};

ModelConfig parse_config(const nlohmann::json& j);
ModelConfig load_config(const std::string& path);

// FNV-1a over the canonical (key-sorted) dump.
std::string config_digest(const nlohmann::json& j);

// [re, im]
nlohmann::json to_json(cplx z);
nlohmann::json to_json(const RVector& v);
nlohmann::json to_json(const RMatrix& m);
nlohmann::json to_json(const CMatrix& m);

// %.17g with "inf", "-inf" and "nan" literals.
std::string format_double(double x);

struct ResultRecord {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  nlohmann::json outputs;
};

nlohmann::json to_json(const ResultRecord& r);
// Throws ConfigError when a report lacks a required field.
void validate_record(const nlohmann::json& j);

}  // namespace rtqw
