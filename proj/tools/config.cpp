#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace dpp_cli {

using dppbound::Vector;

Section::Section(const nlohmann::json& j, std::string path) : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) throw InputError(path_ + ": expected an object");
}

bool Section::has(const std::string& key) const { return j_->contains(key); }

const nlohmann::json& Section::at(const std::string& key) {
  if (!j_->contains(key)) throw InputError(path_ + ": missing key '" + key + "'");
  used_.insert(key);
  return (*j_)[key];
}

double Section::number(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_number()) throw InputError(path_ + "." + key + ": expected a number");
  const double out = v.get<double>();
  if (!std::isfinite(out)) throw InputError(path_ + "." + key + ": must be finite");
  return out;
}

double Section::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

Index Section::integer(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_number_integer()) throw InputError(path_ + "." + key + ": expected an integer");
  return v.get<Index>();
}

Index Section::integer(const std::string& key, Index fallback) { return has(key) ? integer(key) : fallback; }

std::uint64_t Section::seed(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_number_unsigned()) throw InputError(path_ + "." + key + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool Section::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_boolean()) throw InputError(path_ + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string Section::string(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_string()) throw InputError(path_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string Section::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> Section::numbers(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_array()) throw InputError(path_ + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InputError(path_ + "." + key + ": expected an array of numbers");
    out.push_back(e.get<double>());
    if (!std::isfinite(out.back())) throw InputError(path_ + "." + key + ": entries must be finite");
  }
  return out;
}

std::vector<Index> Section::integers(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_array()) throw InputError(path_ + "." + key + ": expected an array of integers");
  std::vector<Index> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw InputError(path_ + "." + key + ": expected an array of integers");
    out.push_back(e.get<Index>());
  }
  return out;
}

std::vector<std::string> Section::strings(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_array()) throw InputError(path_ + "." + key + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw InputError(path_ + "." + key + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Section Section::object(const std::string& key) { return Section(at(key), path_ + "." + key); }

std::vector<Section> Section::objects(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_array()) throw InputError(path_ + "." + key + ": expected an array of objects");
  std::vector<Section> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], path_ + "." + key + "[" + std::to_string(i) + "]");
  return out;
}

void Section::finish() const {
  for (auto it = j_->begin(); it != j_->end(); ++it)
    if (!used_.count(it.key())) throw InputError(path_ + ": unknown key '" + it.key() + "'");
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw InputError("config '" + path + "': top level must be an object");
  return j;
}

namespace {

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
  return out;
}

}  // namespace

dppbound::KernelParams read_kernel(Section s, bool allow_zero_amplitude) {
  const double amplitude = s.number("amplitude", 1.0);
  const auto l = s.numbers("lengthscales");
  s.finish();
  if (l.empty()) throw InputError(s.path() + ".lengthscales: must not be empty");
  if (allow_zero_amplitude && amplitude == 0.0) {
    dppbound::KernelParams out(1.0, to_vector(l));
    out.amplitude = 0.0;
    return out;
  }
  dppbound::KernelParams out(amplitude, to_vector(l));
  return out;
}

dppbound::GaussianBaseMeasure read_base(Section s) {
  const double intensity = s.number("intensity");
  const auto mean = s.numbers("mean");
  const auto scale = s.numbers("scale");
  s.finish();
  if (mean.size() != scale.size() || mean.empty())
    throw InputError(s.path() + ": mean and scale must be nonempty and of equal length");
  dppbound::GaussianBaseMeasure out(intensity, to_vector(mean), to_vector(scale));
  out.validate();
  return out;
}

std::optional<ModelSpec> read_model(Section& s, bool need_base) {
  if (s.has("gg")) {
    if (s.has("kernel") || s.has("base")) throw InputError(s.path() + ": give either 'gg' or 'kernel'/'base', not both");
    Section g = s.object("gg");
    const double kappa = g.number("kappa");
    const double alpha = g.number("alpha");
    const double eps = g.number("eps");
    g.finish();
    if (!(kappa >= 0.0) || !(alpha > 0.0) || !(eps > 0.0))
      throw InputError(g.path() + ": need kappa >= 0, alpha > 0, eps > 0");
    ModelSpec m{dppbound::KernelParams::from_eps(eps), dppbound::GaussianBaseMeasure::from_alpha(kappa, alpha)};
    return m;
  }
  if (!s.has("kernel")) {
    if (s.has("base")) throw InputError(s.path() + ": 'base' needs 'kernel'");
    return std::nullopt;
  }
  ModelSpec m{read_kernel(s.object("kernel")), std::nullopt};
  if (s.has("base")) {
    m.base = read_base(s.object("base"));
    if (m.base->dim() != m.kernel.dim()) throw InputError(s.path() + ": kernel and base differ in dimension");
  } else if (need_base) {
    throw InputError(s.path() + ": missing key 'base'");
  }
  return m;
}

dppbound::PriorBox read_prior(Section& s, const std::string& key, const dppbound::PriorBox& fallback) {
  if (!s.has(key)) return fallback;
  dppbound::PriorBox out;
  for (auto& iv : s.objects(key)) {
    dppbound::PriorInterval p;
    p.name = iv.string("name");
    p.lo = iv.number("lo");
    p.hi = iv.number("hi");
    const std::string scale = iv.string("scale", "log");
    iv.finish();
    if (scale == "natural") p.scale = dppbound::PriorScale::Natural;
    else if (scale == "log") p.scale = dppbound::PriorScale::Log;
    else throw InputError(iv.path() + ".scale: expected 'natural' or 'log'");
    out.intervals.push_back(p);
  }
  out.validate();
  return out;
}

}  // namespace dpp_cli
