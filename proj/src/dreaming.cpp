#include "dreamnet/dreaming.hpp"

#include <iomanip>
#include <ostream>

namespace dreamnet {

void DreamSchedule::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("DreamSchedule: epsilon must be positive");
  if (max_cycles < 1) throw std::invalid_argument("DreamSchedule: max_cycles must be at least 1");
  if (!(tol > 0)) throw std::invalid_argument("DreamSchedule: tol must be positive");
}

void write_trace_csv(const DreamTrace& trace, std::ostream& os) {
  os << "k,rate,distance,min_eig,commutator_norm\n" << std::setprecision(12);
  for (const auto& r : trace.records)
    os << r.k << ',' << r.rate << ',' << r.distance << ',' << r.min_eig << ',' << r.commutator_norm << '\n';
}

}  // namespace dreamnet
