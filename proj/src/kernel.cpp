#include "dreamnet/kernel.hpp"

#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>

namespace dreamnet {

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::hebbian: return "hebbian";
    case CouplingKind::dream: return "dream";
    case CouplingKind::dotsenko: return "dotsenko";
    case CouplingKind::projector: return "projector";
  }
  return "unknown";
}

NetworkState::NetworkState(Spins sigma) : sigma_(std::move(sigma)) {
  if (sigma_.size() < 1) throw std::invalid_argument("NetworkState: empty state");
  for (Eigen::Index i = 0; i < sigma_.size(); ++i)
    if (sigma_(i) != 1 && sigma_(i) != -1) throw std::invalid_argument("NetworkState: spins must be +1 or -1");
}

NetworkState NetworkState::from_pattern(const PatternSet& ps, int mu) {
  if (mu < 0 || mu >= ps.p()) throw std::out_of_range("NetworkState::from_pattern: bad pattern index");
  return NetworkState(Spins(ps.entries().row(mu).transpose()));
}

void NetworkState::set(int i, std::int8_t v) {
  if (v != 1 && v != -1) throw std::invalid_argument("NetworkState::set: spins must be +1 or -1");
  sigma_(i) = v;
}

Eigen::VectorXd mattis_overlaps(const PatternSet& ps, const NetworkState& s) {
  if (ps.n() != s.size()) throw std::invalid_argument("mattis_overlaps: dimension mismatch");
  Eigen::VectorXi dots = ps.entries().cast<int>() * s.spins().cast<int>();
  return dots.cast<double>() / double(ps.n());
}

void write_coupling_csv(const Matrix<double>& j, std::ostream& os) {
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < j.rows(); ++r) {
    for (Eigen::Index c = 0; c < j.cols(); ++c) {
      if (c) os << ',';
      os << j(r, c);
    }
    os << '\n';
  }
}

namespace {
constexpr char kMagic[4] = {'D', 'N', 'C', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_coupling_binary: truncated stream");
  return v;
}
}  // namespace

void write_coupling_binary(const Matrix<double>& j, const CouplingHeader& h, std::ostream& os) {
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, std::uint32_t(h.kind));
  put(os, h.t);
  put(os, std::uint32_t(h.n));
  put(os, std::uint32_t(h.p));
  put(os, h.seed);
  os.write(reinterpret_cast<const char*>(j.data()), std::streamsize(j.size() * sizeof(double)));
}

Matrix<double> read_coupling_binary(std::istream& is, CouplingHeader* out) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("read_coupling_binary: bad magic");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("read_coupling_binary: unknown version");
  CouplingHeader h;
  h.kind = CouplingKind(get<std::uint32_t>(is));
  h.t = get<double>(is);
  h.n = int(get<std::uint32_t>(is));
  h.p = int(get<std::uint32_t>(is));
  h.seed = get<std::uint64_t>(is);
  Matrix<double> j(h.n, h.n);
  is.read(reinterpret_cast<char*>(j.data()), std::streamsize(j.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_coupling_binary: truncated stream");
  if (out) *out = h;
  return j;
}

}  // namespace dreamnet
