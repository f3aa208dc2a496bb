#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "tnsim/noise.hpp"

namespace tnsim {
namespace {

long lattice_sphere_count(long r2) {
  const auto r = static_cast<int>(std::sqrt(static_cast<double>(r2))) + 1;
  long count = 0;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) {
      const long rest = r2 - static_cast<long>(x) * x - static_cast<long>(y) * y;
      if (rest < 0) continue;
      const auto z = static_cast<long>(std::llround(std::sqrt(static_cast<double>(rest))));
      if (z * z == rest) count += z == 0 ? 1 : 2;
    }
  }
  return count;
}

}  // namespace

ThetaSpectrum ThetaSpectrum::shell(int n, double alpha_decay) {
  if (n < 1) throw std::invalid_argument("theta shell needs n >= 1");
  if (!(alpha_decay > 0.0)) throw std::invalid_argument("theta shell needs alpha_decay > 0");
  const long lo = static_cast<long>(n) * n;
  const long hi = 4 * lo;
  std::vector<ThetaEntry> entries;
  for (int x = -2 * n; x <= 2 * n; ++x) {
    for (int y = -2 * n; y <= 2 * n; ++y) {
      for (int z = -2 * n; z <= 2 * n; ++z) {
        const Wavevector k{x, y, z};
        const long k2 = norm2(k);
        if (k2 < lo || k2 > hi) continue;
        entries.push_back({k, std::pow(static_cast<double>(k2), -0.5 * alpha_decay)});
      }
    }
  }
  if (entries.empty()) {
    throw std::invalid_argument("theta shell n=" + std::to_string(n) + " has no lattice points");
  }
  double sum = 0.0;
  for (const auto& e : entries) sum += e.theta * e.theta;
  const double norm = std::sqrt(sum);
  for (auto& e : entries) e.theta /= norm;
  ThetaSpectrum t = from_entries(std::move(entries));
  t.shell_n_ = n;
  t.alpha_decay_ = alpha_decay;
  return t;
}

ThetaSpectrum ThetaSpectrum::from_entries(std::vector<ThetaEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const ThetaEntry& a, const ThetaEntry& b) { return a.k < b.k; });
  std::map<Wavevector, double> lookup;
  for (const auto& e : entries) {
    if (e.k == Wavevector{0, 0, 0}) throw std::invalid_argument("theta support must exclude k = 0");
    if (!(e.theta >= 0.0) || !std::isfinite(e.theta)) {
      throw std::invalid_argument("theta values must be finite and nonnegative");
    }
    if (!lookup.emplace(e.k, e.theta).second) throw std::invalid_argument("duplicate theta mode");
  }
  ThetaSpectrum t;
  for (const auto& e : entries) {
    const auto it = lookup.find(-e.k);
    if (it == lookup.end() || it->second != e.theta) {
      throw std::invalid_argument("theta must satisfy theta_{-k} = theta_k on a symmetric support");
    }
    if (in_positive_half(e.k)) t.positive_.push_back(e);
  }
  double sum = 0.0;
  for (const auto& e : entries) sum += e.theta * e.theta;
  t.normalized_ = std::abs(sum - 1.0) <= 1e-12;

  // Radial: each occupied sphere |k|^2 = r2 is fully covered with one value.
  std::map<long, std::pair<long, double>> spheres;
  t.radial_ = true;
  for (const auto& e : entries) {
    auto [it, fresh] = spheres.emplace(norm2(e.k), std::pair<long, double>{0, e.theta});
    if (!fresh && it->second.second != e.theta) t.radial_ = false;
    ++it->second.first;
  }
  for (const auto& [r2, s] : spheres) {
    if (s.first != lattice_sphere_count(r2)) t.radial_ = false;
  }
  t.entries_ = std::move(entries);
  return t;
}

double ThetaSpectrum::l2() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.theta * e.theta;
  return std::sqrt(s);
}

double ThetaSpectrum::linf() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.theta);
  return m;
}

int ThetaSpectrum::max_component() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, tnsim::max_norm(e.k));
  return m;
}

double ThetaSpectrum::max_norm() const {
  long m = 0;
  for (const auto& e : entries_) m = std::max(m, norm2(e.k));
  return std::sqrt(static_cast<double>(m));
}

nlohmann::json ThetaSpectrum::to_json() const {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& e : entries_) modes.push_back({{"k", e.k}, {"theta", e.theta}});
  nlohmann::json j{{"normalized", normalized_}, {"radially_symmetric", radial_}, {"modes", modes}};
  j["n"] = shell_n_ ? nlohmann::json(*shell_n_) : nlohmann::json(nullptr);
  j["alpha_decay"] = alpha_decay_ ? nlohmann::json(*alpha_decay_) : nlohmann::json(nullptr);
  return j;
}

ThetaSpectrum ThetaSpectrum::from_json(const nlohmann::json& j) {
  std::vector<ThetaEntry> entries;
  for (const auto& m : j.at("modes")) {
    entries.push_back({m.at("k").get<Wavevector>(), m.at("theta").get<double>()});
  }
  ThetaSpectrum t = from_entries(std::move(entries));
  if (j.contains("n") && !j["n"].is_null()) t.shell_n_ = j["n"].get<int>();
  if (j.contains("alpha_decay") && !j["alpha_decay"].is_null()) {
    t.alpha_decay_ = j["alpha_decay"].get<double>();
  }
  return t;
}

}  // namespace tnsim
