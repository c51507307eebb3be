#include "causal/prior_losses.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "causal/error.hpp"

namespace causal {

EmbeddingSet::EmbeddingSet(std::size_t classes, std::size_t hidden, std::vector<double> rows)
    : classes_(classes), hidden_(hidden), rows_(std::move(rows)) {
  if (classes_ < 2 || hidden_ < 1) {
    throw Error(ErrorKind::InvalidInput, "embedding set needs n_c >= 2 and h >= 1");
  }
  if (rows_.size() != classes_ * hidden_) {
    throw Error(ErrorKind::ShapeMismatch, "embedding set must hold n_c*h values");
  }
  for (double v : rows_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "embedding values must be finite");
  }
}

PriorMap::PriorMap(std::size_t classes, std::vector<double> entries)
    : classes_(classes), entries_(std::move(entries)) {
  if (classes_ < 1 || entries_.size() != classes_ * classes_) {
    throw Error(ErrorKind::ShapeMismatch, "prior map must be square");
  }
  for (double v : entries_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorKind::InvalidInput, "prior map entries must lie in [0, 1]");
    }
  }
}

PriorMap read_prior_map(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidInput, "prior map: cannot parse '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != n) throw Error(ErrorKind::ShapeMismatch, "prior map rows must have n_c entries");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return PriorMap(n, std::move(flat));
}

void write_prior_map(std::ostream& out, const PriorMap& map) {
  const std::size_t n = map.classes();
  out << std::setprecision(17);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << map.entries()[i * n + j];
    out << '\n';
  }
}

CausalityMap embedding_causality_map(const EmbeddingSet& q, double epsilon) {
  const auto vals = q.values();
  if (std::any_of(vals.begin(), vals.end(), [](double v) { return v < 0.0; })) {
    throw Error(ErrorKind::InvalidInput, "embeddings must be non-negative");
  }
  const double top = *std::max_element(vals.begin(), vals.end());
  if (top <= 0.0) throw Error(ErrorKind::ZeroStack, "global maximum of the embeddings is 0");

  const std::size_t nc = q.classes();
  std::vector<double> peak(nc);
  std::vector<double> mass(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    double m = 0.0;
    double s = 0.0;
    for (double v : q.row(c)) {
      m = std::max(m, v / top);
      s += v / top;
    }
    peak[c] = m;
    mass[c] = std::max(s, epsilon);
  }
  std::vector<double> out(nc * nc);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < nc; ++j) out[i * nc + j] = peak[i] * peak[j] / mass[j];
  }
  return CausalityMap(nc, std::move(out), Estimator::Max);
}

double task_prior_loss(const CausalityMap& c, const PriorMap& c_gt, double weight) {
  if (c.k() != c_gt.classes()) {
    throw Error(ErrorKind::ShapeMismatch, "learned map and prior map differ in size");
  }
  const auto a = c.entries();
  const auto b = c_gt.entries();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return weight * sum / static_cast<double>(a.size());
}

double minibatch_alignment_loss(std::span<const CausalityMap> maps, std::span<const int> labels) {
  if (maps.empty()) throw Error(ErrorKind::EmptyBatch, "mini-batch alignment loss of an empty batch");
  if (labels.size() != maps.size()) {
    throw Error(ErrorKind::ShapeMismatch, "one label per causality map is required");
  }
  const std::size_t k = maps.front().k();
  for (const auto& m : maps) {
    if (m.k() != k) throw Error(ErrorKind::ShapeMismatch, "causality maps differ in size");
  }

  std::map<int, std::pair<std::vector<double>, std::size_t>> class_sums;
  for (std::size_t b = 0; b < maps.size(); ++b) {
    auto& [sum, count] = class_sums[labels[b]];
    sum.resize(k * k, 0.0);
    const auto e = maps[b].entries();
    for (std::size_t i = 0; i < e.size(); ++i) sum[i] += e[i];
    ++count;
  }

  double total = 0.0;
  for (std::size_t b = 0; b < maps.size(); ++b) {
    const auto& [sum, count] = class_sums.at(labels[b]);
    const auto e = maps[b].entries();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double d = e[i] - sum[i] / static_cast<double>(count);
      total += d * d;
    }
  }
  return total / static_cast<double>(maps.size());
}

double weighted_total_alignment(const SiteValues& losses, const SiteValues& weights) {
  double total = 0.0;
  for (std::size_t s = 0; s < losses.size(); ++s) {
    if (weights[s] < 0.0) throw Error(ErrorKind::InvalidInput, "site weights must be non-negative");
    total += weights[s] * losses[s];
  }
  return total;
}

}  // namespace causal
