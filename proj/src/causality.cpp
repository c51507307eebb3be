#include "causal/causality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causal/error.hpp"

namespace causal {

FeatureStack::FeatureStack(std::size_t k, std::size_t n, std::vector<double> values)
    : k_(k), n_(n), values_(std::move(values)) {
  if (k_ < 2) throw Error(ErrorKind::InvalidInput, "feature stack needs k >= 2 maps");
  if (n_ < 1) throw Error(ErrorKind::InvalidInput, "feature maps need side n >= 1");
  if (values_.size() != k_ * n_ * n_) {
    throw Error(ErrorKind::InvalidInput, "feature stack holds " + std::to_string(values_.size()) +
                                             " values, expected k*n*n = " +
                                             std::to_string(k_ * n_ * n_));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidInput, "feature values must be finite and non-negative");
    }
  }
}

std::string to_string(Estimator e) { return e == Estimator::Max ? "max" : "lehmer"; }

Estimator parse_estimator(const std::string& s) {
  if (s == "max") return Estimator::Max;
  if (s == "lehmer") return Estimator::Lehmer;
  throw Error(ErrorKind::InvalidInput, "unknown estimator '" + s + "' (expected max|lehmer)");
}

void EstimatorConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidInput, "epsilon must be a positive finite number");
  }
  if (!std::isfinite(lehmer_p)) throw Error(ErrorKind::InvalidInput, "lehmer_p must be finite");
}

CausalityMap::CausalityMap(std::size_t k, std::vector<double> entries, Estimator method)
    : k_(k), entries_(std::move(entries)), method_(method) {
  if (k_ < 1 || entries_.size() != k_ * k_) {
    throw Error(ErrorKind::ShapeMismatch, "causality map must hold k*k entries");
  }
  for (double v : entries_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidInput, "causality map entries must be finite and non-negative");
    }
  }
}

FeatureStack normalize_stack(const FeatureStack& stack) {
  const auto vals = stack.values();
  const double top = *std::max_element(vals.begin(), vals.end());
  if (top <= 0.0) throw Error(ErrorKind::ZeroStack, "global maximum of the feature stack is 0");
  std::vector<double> out(vals.begin(), vals.end());
  for (double& v : out) v /= top;
  return FeatureStack(stack.k(), stack.n(), std::move(out));
}

double lehmer_mean(std::span<const double> x, double p, double epsilon) {
  if (x.empty()) throw Error(ErrorKind::EmptyVector, "Lehmer mean of an empty vector");
  const bool clamp = p < 0.0;
  auto value = [&](double v) { return clamp ? std::max(v, epsilon) : v; };

  double ref = value(x[0]);
  for (double v : x) ref = clamp ? std::min(ref, value(v)) : std::max(ref, value(v));
  if (ref == 0.0) return 0.0;  // all-zero vector with p >= 0

  double num = 0.0;
  double den = 0.0;
  for (double v : x) {
    const double r = value(v) / ref;
    num += std::pow(r, p + 1.0);
    den += std::pow(r, p);
  }
  const double out = ref * num / den;
  if (!std::isfinite(out)) throw Error(ErrorKind::NumericOverflow, "Lehmer mean is not finite");
  return out;
}

namespace {

std::vector<double> max_map(const FeatureStack& x, double eps) {
  const std::size_t k = x.k();
  std::vector<double> peak(k);
  std::vector<double> mass(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto m = x.map(i);
    peak[i] = *std::max_element(m.begin(), m.end());
    double s = 0.0;
    for (double v : m) s += v;
    mass[i] = std::max(s, eps);
  }
  std::vector<double> out(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out[i * k + j] = peak[i] * peak[j] / mass[j];
  }
  return out;
}

// Per-map summary used to assemble Lehmer power sums of outer products.
struct PowerSums {
  std::size_t nonzero = 0;
  double min_nonzero = 0.0;
  double sum_p = 0.0;   // sum over nonzero v of (v / min_nonzero)^p
  double sum_p1 = 0.0;  // same with exponent p + 1
};

PowerSums power_sums(std::span<const double> m, double p) {
  PowerSums s;
  s.min_nonzero = std::numeric_limits<double>::infinity();
  for (double v : m) {
    if (v > 0.0) {
      ++s.nonzero;
      s.min_nonzero = std::min(s.min_nonzero, v);
    }
  }
  if (s.nonzero == 0) return s;
  for (double v : m) {
    if (v > 0.0) {
      const double r = v / s.min_nonzero;
      s.sum_p += std::pow(r, p);
      s.sum_p1 += std::pow(r, p + 1.0);
    }
  }
  return s;
}

// LM_p over every clamped product a*b, evaluated directly. Only reached when
// two nonzero elements multiply to less than epsilon.
double lehmer_of_products_direct(std::span<const double> a, std::span<const double> b, double p,
                                 double eps) {
  double ref = std::numeric_limits<double>::infinity();
  for (double u : a) {
    for (double v : b) ref = std::min(ref, std::max(u * v, eps));
  }
  double num = 0.0;
  double den = 0.0;
  for (double u : a) {
    for (double v : b) {
      const double r = std::max(u * v, eps) / ref;
      num += std::pow(r, p + 1.0);
      den += std::pow(r, p);
    }
  }
  return ref * num / den;
}

std::vector<double> lehmer_map(const FeatureStack& x, double p, double eps) {
  const std::size_t k = x.k();
  std::vector<double> single(k);
  for (std::size_t i = 0; i < k; ++i) single[i] = lehmer_mean(x.map(i), p, eps);

  std::vector<double> out(k * k);
  if (p >= 0.0) {
    // No clamping: sum_{a,b} (x_a y_b)^q = (sum x^q)(sum y^q), so the
    // Lehmer mean of the product vector is the product of Lehmer means.
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        out[i * k + j] = single[i] * single[j] / std::max(single[j], eps);
      }
    }
    return out;
  }

  std::vector<PowerSums> sums(k);
  for (std::size_t i = 0; i < k; ++i) sums[i] = power_sums(x.map(i), p);
  const double total = static_cast<double>(x.map_size()) * static_cast<double>(x.map_size());

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const PowerSums& a = sums[i];
      const PowerSums& b = sums[j];
      double num;
      if (a.nonzero == 0 || b.nonzero == 0) {
        num = eps;  // every product is clamped
      } else if (a.min_nonzero * b.min_nonzero < eps) {
        num = lehmer_of_products_direct(x.map(i), x.map(j), p, eps);
      } else {
        const double paired = static_cast<double>(a.nonzero) * static_cast<double>(b.nonzero);
        const double clamped = total - paired;
        const double base = a.min_nonzero * b.min_nonzero;
        const double ref = clamped > 0.0 ? eps : base;
        double t_p = a.sum_p * b.sum_p * std::pow(base / ref, p);
        double t_p1 = a.sum_p1 * b.sum_p1 * std::pow(base / ref, p + 1.0);
        if (clamped > 0.0) {
          t_p += clamped;  // clamped products equal ref
          t_p1 += clamped;
        }
        num = ref * t_p1 / t_p;
      }
      out[i * k + j] = num / std::max(single[j], eps);
    }
  }
  return out;
}

}  // namespace

CausalityMap compute_causality_map(const FeatureStack& stack, const EstimatorConfig& cfg) {
  cfg.validate();
  const FeatureStack x = normalize_stack(stack);
  std::vector<double> entries = cfg.method == Estimator::Max
                                    ? max_map(x, cfg.epsilon)
                                    : lehmer_map(x, cfg.lehmer_p, cfg.epsilon);
  for (double v : entries) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NumericOverflow,
                  "causality map entry is not finite; |p| too extreme for this stack");
    }
  }
  return CausalityMap(stack.k(), std::move(entries), cfg.method);
}

}  // namespace causal
