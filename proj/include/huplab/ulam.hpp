#pragma once

// Ulam discretisation of the Perron-Frobenius operator P_beta on n equal
// bins of (-p, p]:
//
//   M(k, l) = |I_l  ∩  U_beta^{-1}(I_k)  ∩  (-beta, beta]| / |I_l|
//
// (column l = source bin, row k = target bin), so M acts on vectors of bin
// masses. Preimages are computed exactly from the monotone inverse branches,
// h_j((a, b]) = (h_j(a), h_j(b)]. Branches 0 < |j| <= J are laid out
// explicitly. The remaining ones live in (-beta/(2J+1), beta/(2J+1)); with
// UlamTail::closed their contribution is summed in closed form (digamma
// differences), otherwise it is dropped and only bounded.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "huplab/detail/format.hpp"
#include "huplab/detail/series.hpp"
#include "huplab/errors.hpp"
#include "huplab/gaussmap.hpp"
#include "huplab/grid.hpp"
#include "huplab/parallel.hpp"

namespace huplab {

enum class UlamTail { truncate, closed };

struct UlamMatrix {
  MapParams params;
  std::size_t n_bins = 0;
  std::int64_t cutoff = 0;
  // Largest fraction of any source bin carried by the branches |j| > J.
  double tail_mass_bound = 0.0;
  bool tail_closed = false;
  Eigen::SparseMatrix<double, Eigen::RowMajor> entries;

  double operator()(std::size_t target, std::size_t source) const {
    return entries.coeff(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(source));
  }

  BinGrid grid() const { return BinGrid(params.p(), n_bins); }

  Eigen::VectorXd column_sums() const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_bins));
    for (Eigen::Index k = 0; k < entries.outerSize(); ++k)
      for (decltype(entries)::InnerIterator it(entries, k); it; ++it) s[it.col()] += it.value();
    return s;
  }

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(entries); }
};

namespace detail {

struct UlamTailGroup {
  int side;             // +1: branches j > 0, -1: branches j < 0
  std::int64_t first;   // |j| range, inclusive
  std::int64_t last;    // -1 for "to infinity"
  std::size_t source;   // bin that contains every branch interval of the group
};

struct UlamTailPlan {
  std::vector<UlamTailGroup> groups;
  std::vector<std::int64_t> extra_branches;  // straddle a bin edge: handled explicitly
};

// Groups the branches |j| > J by the source bin that contains them.
inline UlamTailPlan plan_ulam_tail(const BinGrid& grid, const MapParams& params, std::int64_t cutoff) {
  UlamTailPlan plan;
  const double beta = params.beta(), p = params.pd();
  const std::size_t n = grid.size();
  constexpr std::int64_t kMaxSteps = 10'000'000;

  for (std::int64_t j = cutoff + 1, steps = 0; steps < kMaxSteps; ++steps) {
    const double right = beta / (2.0 * static_cast<double>(j) - 1.0);
    if (right > p) {
      plan.extra_branches.push_back(j++);
      continue;
    }
    const std::size_t l = grid.index_of(right);
    const double a_l = grid.lower(l);
    if (a_l <= 0.0) {
      plan.groups.push_back({+1, j, -1, l});
      break;
    }
    auto j2 = static_cast<std::int64_t>(std::floor((beta / a_l - 1.0) / 2.0));
    while (j2 >= j && beta / (2.0 * static_cast<double>(j2) + 1.0) < a_l) --j2;
    if (j2 >= j) {
      plan.groups.push_back({+1, j, j2, l});
      j = j2 + 1;
    } else {
      plan.extra_branches.push_back(j++);
    }
  }

  for (std::int64_t m = cutoff + 1, steps = 0; steps < kMaxSteps; ++steps) {
    const double left = -beta / (2.0 * static_cast<double>(m) - 1.0);
    if (left < -p) {
      plan.extra_branches.push_back(-(m++));
      continue;
    }
    std::size_t l = grid.index_of(left);
    if (left == grid.upper(l) && l + 1 < n) ++l;
    const double b_l = grid.upper(l);
    if (b_l >= 0.0) {
      plan.groups.push_back({-1, m, -1, l});
      break;
    }
    auto m2 = static_cast<std::int64_t>(std::floor((beta / -b_l - 1.0) / 2.0));
    while (m2 >= m && -beta / (2.0 * static_cast<double>(m2) + 1.0) > b_l) --m2;
    if (m2 >= m) {
      plan.groups.push_back({-1, m, m2, l});
      m = m2 + 1;
    } else {
      plan.extra_branches.push_back(-(m++));
    }
  }
  return plan;
}

// Total length of h_j((a, b]) over the group's branches.
inline double group_image_length(const UlamTailGroup& g, double a, double b, const MapParams& params) {
  const double two_p = 2.0 * params.pd();
  const double half_beta = 0.5 * params.beta();
  double c1, c2;
  if (g.side > 0) {
    // p*beta/(2pj - t) = (beta/2) / (j - t/2p)
    c1 = -b / two_p;
    c2 = -a / two_p;
  } else {
    // |h_{-m}(t)| = (beta/2) / (m + t/2p)
    c1 = a / two_p;
    c2 = b / two_p;
  }
  const auto first = static_cast<double>(g.first);
  if (g.last < 0) return half_beta * harmonic_tail_diff(first, c1, c2);
  return half_beta * harmonic_range_diff(first, static_cast<double>(g.last), c1, c2);
}

class RowAccumulator {
 public:
  explicit RowAccumulator(std::size_t n) : acc_(n, 0.0), used_(n, 0) {}

  void add(std::size_t l, double v) {
    if (!used_[l]) {
      used_[l] = 1;
      touched_.push_back(l);
    }
    acc_[l] += v;
  }

  std::vector<std::pair<std::size_t, double>> take() {
    std::sort(touched_.begin(), touched_.end());
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(touched_.size());
    for (auto l : touched_) {
      if (acc_[l] != 0.0) out.emplace_back(l, acc_[l]);
      acc_[l] = 0.0;
      used_[l] = 0;
    }
    touched_.clear();
    return out;
  }

 private:
  std::vector<double> acc_;
  std::vector<char> used_;
  std::vector<std::size_t> touched_;
};

// Adds |h_j((a, b]) ∩ I_l| / |I_l| to the row for every source bin l.
inline void add_branch(RowAccumulator& row, const BinGrid& grid, const MapParams& params,
                       std::int64_t j, double a, double b) {
  const double p = params.pd(), pb = p * params.beta();
  const double da = 2.0 * p * static_cast<double>(j) - a;
  const double db = 2.0 * p * static_cast<double>(j) - b;
  double lo = pb / da, hi = pb / db;
  const double inv_w = 1.0 / grid.width();
  lo = std::max(lo, -p);
  hi = std::min(hi, p);
  if (!(hi > lo)) return;
  std::size_t l = grid.index_of(lo);
  if (lo == grid.upper(l) && l + 1 < grid.size()) ++l;
  if (hi <= grid.upper(l) && lo >= grid.lower(l) && lo == pb / da && hi == pb / db) {
    // Whole image in one bin: use the product form for the length.
    row.add(l, pb * (b - a) / (da * db) * inv_w);
    return;
  }
  for (; l < grid.size() && grid.lower(l) < hi; ++l) {
    const double overlap = std::min(hi, grid.upper(l)) - std::max(lo, grid.lower(l));
    if (overlap > 0.0) row.add(l, overlap * inv_w);
  }
}

// Largest fraction of a source bin inside (-r, 0) ∪ (0, r], r = beta/(2J+1).
inline double ulam_tail_mass(const BinGrid& grid, const MapParams& params, std::int64_t cutoff) {
  const double r = std::min(params.beta() / (2.0 * static_cast<double>(cutoff) + 1.0), params.pd());
  double worst = 0.0;
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double overlap = std::max(0.0, std::min(r, grid.upper(l)) - std::max(-r, grid.lower(l)));
    worst = std::max(worst, overlap / grid.width());
  }
  return std::min(worst, 1.0);
}

}  // namespace detail

inline UlamMatrix ulam_assemble(std::size_t n_bins, const MapParams& params, std::int64_t cutoff,
                                UlamTail tail = UlamTail::closed) {
  if (n_bins < 2) throw ParameterError("ulam_assemble: need at least two bins");
  if (cutoff < 2) throw ParameterError("ulam_assemble: cutoff J must be >= 2");
  const BinGrid grid(params.p(), n_bins);
  const auto plan = tail == UlamTail::closed ? detail::plan_ulam_tail(grid, params, cutoff)
                                             : detail::UlamTailPlan{};

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n_bins);
  const unsigned threads = thread_count();
  const std::size_t chunk = (n_bins + threads - 1) / threads;
  parallel_for(threads, [&](std::size_t t) {
    detail::RowAccumulator row(n_bins);
    const std::size_t lo = t * chunk, hi = std::min(n_bins, lo + chunk);
    for (std::size_t k = lo; k < hi; ++k) {
      const double a = grid.lower(k), b = grid.upper(k);
      for (std::int64_t j = 1; j <= cutoff; ++j) detail::add_branch(row, grid, params, j, a, b);
      for (std::int64_t j = 1; j <= cutoff; ++j) detail::add_branch(row, grid, params, -j, a, b);
      for (auto j : plan.extra_branches) detail::add_branch(row, grid, params, j, a, b);
      for (const auto& g : plan.groups)
        row.add(g.source, detail::group_image_length(g, a, b, params) / grid.width());
      rows[k] = row.take();
    }
  }, threads);

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < n_bins; ++k)
    for (const auto& [l, v] : rows[k])
      triplets.emplace_back(static_cast<int>(k), static_cast<int>(l), v);

  UlamMatrix m{params, n_bins, cutoff, detail::ulam_tail_mass(grid, params, cutoff),
               tail == UlamTail::closed, {}};
  m.entries.resize(static_cast<Eigen::Index>(n_bins), static_cast<Eigen::Index>(n_bins));
  m.entries.setFromTriplets(triplets.begin(), triplets.end());
  m.entries.makeCompressed();
  return m;
}

// ---------------------------------------------------------------------------
// Serialisation
//
// CSV:
//   # huplab ulam v1
//   p,beta,n_bins,J,tail_mass_bound,tail_closed
//   <values of the header fields>
//   n lines of n comma-separated entries, row k = target bin k
//
// Binary (little-endian):
//   char[8] "HUPULAM1", int32 p, int32 tail_closed, float64 beta,
//   uint64 n_bins, int64 J, float64 tail_mass_bound,
//   n*n float64 entries in row-major order.
// ---------------------------------------------------------------------------

inline void write_ulam_csv(std::ostream& os, const UlamMatrix& m) {
  using detail::format_double;
  os << "# huplab ulam v1\n";
  os << "p,beta,n_bins,J,tail_mass_bound,tail_closed\n";
  os << m.params.p() << ',' << format_double(m.params.beta()) << ',' << m.n_bins << ',' << m.cutoff
     << ',' << format_double(m.tail_mass_bound) << ',' << (m.tail_closed ? 1 : 0) << '\n';
  const Eigen::MatrixXd d = m.dense();
  for (Eigen::Index k = 0; k < d.rows(); ++k) {
    for (Eigen::Index l = 0; l < d.cols(); ++l) {
      if (l) os << ',';
      os << format_double(d(k, l));
    }
    os << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

inline UlamMatrix ulam_from_dense(const MapParams& params, std::size_t n, std::int64_t cutoff,
                                  double tail_mass, bool closed, const std::vector<double>& data) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      if (double v = data[k * n + l]; v != 0.0)
        triplets.emplace_back(static_cast<int>(k), static_cast<int>(l), v);
  UlamMatrix m{params, n, cutoff, tail_mass, closed, {}};
  m.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.entries.setFromTriplets(triplets.begin(), triplets.end());
  m.entries.makeCompressed();
  return m;
}

}  // namespace detail

inline UlamMatrix read_ulam_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# huplab ulam v1", 0) != 0)
    throw std::runtime_error("read_ulam_csv: missing '# huplab ulam v1' header");
  if (!std::getline(is, line) || line != "p,beta,n_bins,J,tail_mass_bound,tail_closed")
    throw std::runtime_error("read_ulam_csv: unexpected column header");
  if (!std::getline(is, line)) throw std::runtime_error("read_ulam_csv: truncated header");
  const auto h = detail::split_csv_line(line);
  if (h.size() != 6) throw std::runtime_error("read_ulam_csv: header needs 6 fields");
  const MapParams params(std::stoi(h[0]), detail::parse_double(h[1]));
  const auto n = static_cast<std::size_t>(std::stoull(h[2]));
  const std::int64_t cutoff = std::stoll(h[3]);
  const double tail = detail::parse_double(h[4]);
  const bool closed = h[5] == "1";
  std::vector<double> data(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::getline(is, line)) throw std::runtime_error("read_ulam_csv: truncated body");
    const auto f = detail::split_csv_line(line);
    if (f.size() != n) throw std::runtime_error("read_ulam_csv: row has wrong length");
    for (std::size_t l = 0; l < n; ++l) data[k * n + l] = detail::parse_double(f[l]);
  }
  return detail::ulam_from_dense(params, n, cutoff, tail, closed, data);
}

namespace detail {
static_assert(std::endian::native == std::endian::little,
              "binary Ulam format is defined as little-endian");

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw std::runtime_error("read_ulam_binary: truncated input");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}
}  // namespace detail

inline void write_ulam_binary(std::ostream& os, const UlamMatrix& m) {
  os.write("HUPULAM1", 8);
  detail::put<std::int32_t>(os, m.params.p());
  detail::put<std::int32_t>(os, m.tail_closed ? 1 : 0);
  detail::put<double>(os, m.params.beta());
  detail::put<std::uint64_t>(os, m.n_bins);
  detail::put<std::int64_t>(os, m.cutoff);
  detail::put<double>(os, m.tail_mass_bound);
  const Eigen::MatrixXd d = m.dense();
  for (Eigen::Index k = 0; k < d.rows(); ++k)
    for (Eigen::Index l = 0; l < d.cols(); ++l) detail::put<double>(os, d(k, l));
}

inline UlamMatrix read_ulam_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, "HUPULAM1", 8) != 0)
    throw std::runtime_error("read_ulam_binary: bad magic");
  const auto p = detail::get<std::int32_t>(is);
  const bool closed = detail::get<std::int32_t>(is) != 0;
  const auto beta = detail::get<double>(is);
  const auto n = static_cast<std::size_t>(detail::get<std::uint64_t>(is));
  const auto cutoff = detail::get<std::int64_t>(is);
  const auto tail = detail::get<double>(is);
  std::vector<double> data(n * n);
  for (auto& v : data) v = detail::get<double>(is);
  return detail::ulam_from_dense(MapParams(p, beta), n, cutoff, tail, closed, data);
}

}  // namespace huplab
