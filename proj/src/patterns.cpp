#include "dreamnet/patterns.hpp"
#include "dreamnet/rng.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dreamnet {

PatternSet::PatternSet(PatternMatrix entries, std::uint64_t seed) : xi_(std::move(entries)), seed_(seed) {
  if (xi_.rows() < 1 || xi_.cols() < 1) throw std::invalid_argument("PatternSet: empty dimensions");
  for (Eigen::Index k = 0; k < xi_.size(); ++k) {
    const auto v = xi_.data()[k];
    if (v != 1 && v != -1) throw std::invalid_argument("PatternSet: entries must be +1 or -1");
  }
}

PatternSet generate_patterns(int n, int p, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("generate_patterns: n and p must be positive");
  Rng rng(derive_seed(seed, {0x9a77e125ULL}));
  PatternMatrix xi(p, n);
  // 64 fair bits per draw, consumed row-major.
  std::uint64_t bits = 0;
  int left = 0;
  for (int mu = 0; mu < p; ++mu) {
    for (int i = 0; i < n; ++i) {
      if (left == 0) {
        bits = rng.next();
        left = 64;
      }
      xi(mu, i) = (bits & 1ULL) ? 1 : -1;
      bits >>= 1;
      --left;
    }
  }
  return PatternSet(std::move(xi), seed);
}

Eigen::MatrixXi pattern_gram(const PatternSet& ps) {
  Eigen::MatrixXi x = ps.entries().cast<int>();
  Eigen::MatrixXi g = x * x.transpose();
  return g;
}

void write_patterns_csv(const PatternSet& ps, std::ostream& os) {
  for (int mu = 0; mu < ps.p(); ++mu) {
    for (int i = 0; i < ps.n(); ++i) {
      if (i) os << ',';
      os << int(ps(mu, i));
    }
    os << '\n';
  }
}

PatternSet read_patterns_csv(std::istream& is, std::uint64_t seed) {
  std::vector<std::vector<std::int8_t>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::int8_t> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::int8_t(std::stoi(cell)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("read_patterns_csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("read_patterns_csv: no rows");
  PatternMatrix xi(rows.size(), rows.front().size());
  for (std::size_t mu = 0; mu < rows.size(); ++mu)
    for (std::size_t i = 0; i < rows[mu].size(); ++i) xi(mu, i) = rows[mu][i];
  return PatternSet(std::move(xi), seed);
}

namespace {
constexpr char kMagic[4] = {'D', 'N', 'P', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_patterns_binary: truncated stream");
  return v;
}
}  // namespace

void write_patterns_binary(const PatternSet& ps, std::ostream& os) {
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, std::uint32_t(ps.n()));
  put(os, std::uint32_t(ps.p()));
  put(os, std::uint64_t(ps.seed()));
  os.write(reinterpret_cast<const char*>(ps.entries().data()), std::streamsize(ps.entries().size()));
}

PatternSet read_patterns_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("read_patterns_binary: bad magic");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("read_patterns_binary: unknown version");
  const auto n = get<std::uint32_t>(is);
  const auto p = get<std::uint32_t>(is);
  const auto seed = get<std::uint64_t>(is);
  PatternMatrix xi(p, n);
  is.read(reinterpret_cast<char*>(xi.data()), std::streamsize(xi.size()));
  if (!is) throw std::runtime_error("read_patterns_binary: truncated stream");
  return PatternSet(std::move(xi), seed);
}

}  // namespace dreamnet
