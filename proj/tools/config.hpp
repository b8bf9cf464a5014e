#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dppbound/kernel.hpp"
#include "dppbound/mcmc.hpp"
#include "json.hpp"

namespace dpp_cli {

using dppbound::Index;
using dppbound::InputError;

/// JSON object view that records which keys were read; finish() rejects the rest.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  Index integer(const std::string& key);
  Index integer(const std::string& key, Index fallback);
  std::uint64_t seed(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<Index> integers(const std::string& key);
  std::vector<std::string> strings(const std::string& key);
  Section object(const std::string& key);
  std::vector<Section> objects(const std::string& key);

  /// Throws on keys never read.
  void finish() const;
  const std::string& path() const { return path_; }

 private:
  const nlohmann::json& at(const std::string& key);
  const nlohmann::json* j_;
  std::string path_;
  std::set<std::string> used_;
};

/// Parses a config file; the top level must be an object.
nlohmann::json load_json(const std::string& path);

/// Model parameters from either {"gg": {kappa, alpha, eps}} or
/// {"kernel": {...}, "base": {...}}.
struct ModelSpec {
  dppbound::KernelParams kernel;
  std::optional<dppbound::GaussianBaseMeasure> base;
};
std::optional<ModelSpec> read_model(Section& s, bool need_base);

/// With allow_zero_amplitude, amplitude 0 is accepted and returned as
/// amplitude 0 without validation (the zero kernel).
dppbound::KernelParams read_kernel(Section s, bool allow_zero_amplitude = false);
dppbound::GaussianBaseMeasure read_base(Section s);

/// Prior intervals: [{"name", "lo", "hi", "scale": "natural" | "log"}].
dppbound::PriorBox read_prior(Section& s, const std::string& key, const dppbound::PriorBox& fallback);

}  // namespace dpp_cli
