#include "acq/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "acq/error.hpp"
#include "acq/io.hpp"
#include "acq/numeric.hpp"

namespace acq {
namespace {

constexpr int kModelVersion = 1;

void require_distribution(std::span<const double> p) {
  if (p.empty()) throw DomainError("empty probability vector");
}

void require_same_size(std::span<const double> f, std::span<const double> r) {
  if (f.size() != r.size()) {
    throw DomainError("probability vectors differ in length");
  }
}

void require_support(std::span<const double> f, std::span<const double> r) {
  require_same_size(f, r);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0 && r[i] <= 0.0) throw DataError("unsupported symbol");
  }
}

}  // namespace

SymbolModel::SymbolModel(std::vector<std::string> alphabet,
                         std::vector<std::uint64_t> counts)
    : alphabet_(std::move(alphabet)), counts_(std::move(counts)) {
  if (counts_.empty()) throw DataError("empty alphabet");
  if (alphabet_.size() != counts_.size()) {
    throw DataError("alphabet and counts differ in length");
  }
  for (std::uint64_t c : counts_) {
    if (c == 0) throw DataError("zero-count symbol in model");
    if (total_ > std::numeric_limits<std::uint64_t>::max() - c) {
      throw DataError("model total overflows 64 bits");
    }
    total_ += c;
  }
  probs_.reserve(counts_.size());
  for (std::uint64_t c : counts_) {
    probs_.push_back(static_cast<double>(static_cast<long double>(c) /
                                         static_cast<long double>(total_)));
  }
}

SymbolModel SymbolModel::from_weights(std::vector<std::uint64_t> weights) {
  std::vector<std::string> names;
  names.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    names.push_back(std::to_string(i));
  }
  return SymbolModel(std::move(names), std::move(weights));
}

EstimatedModel estimate_model(std::span<const std::uint32_t> stream,
                              std::size_t alphabet_size,
                              const std::vector<std::string>& alphabet) {
  if (stream.empty()) throw DataError("empty corpus");
  if (!alphabet.empty() && alphabet.size() != alphabet_size) {
    throw DomainError("alphabet names do not match alphabet size");
  }
  std::vector<std::uint64_t> counts(alphabet_size, 0);
  for (std::uint32_t id : stream) {
    if (id >= alphabet_size) throw DataError("unsupported symbol");
    ++counts[id];
  }
  std::vector<std::string> names;
  std::vector<std::uint64_t> kept;
  std::vector<std::int64_t> remap(alphabet_size, -1);
  for (std::size_t i = 0; i < alphabet_size; ++i) {
    if (counts[i] == 0) continue;
    remap[i] = static_cast<std::int64_t>(kept.size());
    kept.push_back(counts[i]);
    names.push_back(alphabet.empty() ? std::to_string(i) : alphabet[i]);
  }
  return {SymbolModel(std::move(names), std::move(kept)), std::move(remap)};
}

std::vector<double> escort(std::span<const double> p, double q) {
  require_distribution(p);
  if (q < 0.0) throw DomainError("escort order q must be >= 0");
  std::vector<double> out(p.size(), 0.0);
  if (q == 1.0) {
    std::copy(p.begin(), p.end(), out.begin());
    return out;
  }
  if (q == 0.0) {
    const auto support = std::count_if(p.begin(), p.end(),
                                       [](double x) { return x > 0.0; });
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) out[i] = 1.0 / static_cast<double>(support);
    }
    return out;
  }
  double top = -std::numeric_limits<double>::infinity();
  for (double x : p) {
    if (x > 0.0) top = std::max(top, q * std::log(x));
  }
  CompensatedSum z;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      out[i] = std::exp(q * std::log(p[i]) - top);
      z.add(out[i]);
    }
  }
  const double norm = z.value();
  for (double& x : out) x /= norm;
  return out;
}

double log2_power_sum(std::span<const double> p, double q) {
  require_distribution(p);
  std::vector<double> exponents;
  exponents.reserve(p.size());
  for (double x : p) {
    if (x > 0.0) exponents.push_back(q * std::log2(x));
  }
  return log2_sum_exp2(exponents);
}

double shannon_entropy(std::span<const double> p) {
  require_distribution(p);
  CompensatedSum h;
  for (double x : p) {
    if (x > 0.0) h.add(-x * std::log2(x));
  }
  return std::max(0.0, h.value());
}

double renyi_entropy(std::span<const double> p, double q) {
  require_distribution(p);
  if (q < 0.0) throw DomainError("Renyi order q must be >= 0");
  if (std::abs(q - 1.0) <= kShannonWindow) return shannon_entropy(p);
  if (q == 0.0) {
    const auto support = std::count_if(p.begin(), p.end(),
                                       [](double x) { return x > 0.0; });
    return std::log2(static_cast<double>(support));
  }
  return std::max(0.0, log2_power_sum(p, q) / (1.0 - q));
}

double campbell_q(double t) {
  if (!(t > -1.0)) throw DomainError("exponent t must be > -1");
  return 1.0 / (1.0 + t);
}

double cross_entropy(std::span<const double> f, std::span<const double> r) {
  require_support(f, r);
  CompensatedSum h;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0) h.add(-f[i] * std::log2(r[i]));
  }
  return h.value();
}

double kl_divergence(std::span<const double> f, std::span<const double> r) {
  require_support(f, r);
  CompensatedSum d;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0) d.add(f[i] * std::log2(f[i] / r[i]));
  }
  return std::max(0.0, d.value());
}

double exp_cross_entropy(std::span<const double> p, std::span<const double> r,
                         double q) {
  require_support(p, r);
  if (!(q > 0.0)) throw DomainError("order q must be > 0");
  if (std::abs(q - 1.0) <= kShannonWindow) return cross_entropy(p, r);
  std::vector<double> exponents;
  std::vector<double> weights;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    exponents.push_back((q - 1.0) * std::log2(r[i]));
    weights.push_back(p[i]);
  }
  return q / (1.0 - q) * log2_sum_exp2(exponents, weights) +
         log2_power_sum(r, q);
}

double er_q(std::span<const double> p, std::span<const double> r, double q) {
  return exp_cross_entropy(p, r, q) - renyi_entropy(p, q);
}

nlohmann::json model_to_json(const SymbolModel& m) {
  return {{"version", kModelVersion},
          {"alphabet", m.alphabet()},
          {"counts", m.counts()},
          {"total", m.total()}};
}

SymbolModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kModelVersion) {
      throw DataError("unsupported model version");
    }
    SymbolModel m(j.at("alphabet").get<std::vector<std::string>>(),
                  j.at("counts").get<std::vector<std::uint64_t>>());
    if (j.contains("total") && j.at("total").get<std::uint64_t>() != m.total()) {
      throw DataError("model total does not match counts");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

SymbolModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model JSON in " + path + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const SymbolModel& m, const std::string& path) {
  write_file_atomic(path, model_to_json(m).dump(2) + "\n");
}

}  // namespace acq
