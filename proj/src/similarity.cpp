#include "scr/similarity.hpp"

#include "scr/error.hpp"
#include "scr/random.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace scr {

namespace {

void require_column(const Vector& x) {
  if (x.size() < 2) throw std::invalid_argument("covariate column needs at least two subjects");
  if (!x.allFinite()) throw std::invalid_argument("covariate column has non-finite values");
}

}  // namespace

SparseSymMatrix kernel_similarity(const Vector& x, double bandwidth, double density) {
  require_column(x);
  if (!(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument(fmt::format("kernel density {} outside (0, 1]", density));
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("kernel bandwidth must be positive");
  }
  const Index p = x.size();
  if (density < 1.0 && x.maxCoeff() == x.minCoeff()) {
    throw DataError("constant covariate column: kernel threshold is undefined");
  }

  std::vector<double> dist2;
  dist2.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) {
      const double d = x[i] - x[j];
      dist2.push_back(d * d);
    }

  double tau = std::numeric_limits<double>::infinity();
  if (density < 1.0) {
    const auto total = dist2.size();
    // Guard density * total against rounding just below an integer.
    const auto keep = static_cast<std::size_t>(std::floor(density * static_cast<double>(total) * (1.0 + 1e-12)));
    if (keep < total) {
      std::vector<double> sorted = dist2;
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(keep), sorted.end());
      tau = sorted[keep];
    }
  }

  std::vector<Triplet> entries;
  std::size_t idx = 0;
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j, ++idx) {
      const double d2 = dist2[idx];
      if (d2 < tau) {
        const double w = std::exp(-bandwidth * d2);
        if (w != 0.0) entries.push_back({i, j, w});
      }
    }
  return SparseSymMatrix::from_triplets(entries, p, true);
}

SparseSymMatrix outerproduct_similarity(const Vector& x) {
  require_column(x);
  return SparseSymMatrix::rank_one(x, 1.0 / static_cast<double>(x.size()));
}

SparseSymMatrix indicator_similarity(const std::vector<std::string>& labels) {
  const auto p = static_cast<Index>(labels.size());
  if (p < 2) throw std::invalid_argument("indicator similarity needs at least two subjects");
  std::map<std::string, std::vector<Index>> groups;
  for (Index j = 0; j < p; ++j) groups[labels[static_cast<std::size_t>(j)]].push_back(j);
  std::vector<Triplet> entries;
  for (const auto& [label, members] : groups) {
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) entries.push_back({members[a], members[b], 1.0});
  }
  return SparseSymMatrix::from_triplets(entries, p, true);
}

SparseSymMatrix edge_similarity(const std::vector<std::pair<Index, Index>>& edges, Index p) {
  std::set<std::pair<Index, Index>> unique;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= p || j >= p) {
      throw std::invalid_argument(fmt::format("edge ({}, {}) out of range for p = {}", i, j, p));
    }
    if (i == j) throw std::invalid_argument(fmt::format("self-loop at node {}", i));
    unique.emplace(std::min(i, j), std::max(i, j));
  }
  std::vector<Triplet> entries;
  entries.reserve(unique.size());
  for (auto [i, j] : unique) entries.push_back({i, j, 1.0});
  return SparseSymMatrix::from_triplets(entries, p, true);
}

SparseSymMatrix rescale_l1(const SparseSymMatrix& w) {
  const double norm = w.l1_norm();
  if (norm == 0.0) throw std::invalid_argument("cannot l1-rescale the zero matrix");
  return w.scaled(1.0 / norm);
}

SparseSymMatrix bernoulli_similarity(Index p, double probability, std::uint64_t seed) {
  if (p < 2) throw std::invalid_argument("bernoulli similarity needs p >= 2");
  if (!(probability >= 0.0 && probability < 1.0)) {
    throw std::invalid_argument(fmt::format("edge probability {} outside [0, 1)", probability));
  }
  Engine engine(seed);
  boost::random::bernoulli_distribution<double> coin(probability);
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(probability * static_cast<double>(p * (p - 1) / 2) * 1.2) + 16);
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j)
      if (coin(engine)) entries.push_back({i, j, 1.0});
  return SparseSymMatrix::from_triplets(entries, p, true);
}

SparseSymMatrix correlated_similarity(const Vector& x) {
  require_column(x);
  const Index p = x.size();
  const auto pd = static_cast<double>(p);
  std::vector<Triplet> entries;
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) {
      const double d = x[i] - x[j];
      const double w = x[i] * x[j] * std::exp(-pd * d * d);
      if (w != 0.0) entries.push_back({i, j, w});
    }
  return SparseSymMatrix::from_triplets(entries, p, true);
}

}  // namespace scr
