#include "nphgsd/report.hpp"

#include <iomanip>
#include <sstream>

namespace nphgsd {

std::string to_csv(const ExpectedEvents& e) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "interval_start,interval_end,arm,expected_events\n";
  for (const auto& r : e.rows)
    os << r.start << ',' << r.end << ',' << (r.arm == Arm::Control ? "control" : "experimental") << ','
       << r.events << '\n';
  return os.str();
}

std::string to_csv(const AhrResult& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "stratum,interval_start,interval_end,hr,log_hr,events_control,events_experimental,weight\n";
  double total = 0;
  for (const auto& x : r.per_interval) total += x.weight;
  for (const auto& x : r.per_interval)
    os << x.stratum << ',' << x.start << ',' << x.end << ',' << x.hr << ',' << x.log_hr << ','
       << x.events_control << ',' << x.events_experimental << ','
       << (total > 0 ? x.weight / total : 0.0) << '\n';
  return os.str();
}

std::string to_csv(const JointDistribution& d) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << "label,mean";
  for (const auto& l : d.labels) os << ",a" << l.analysis + 1 << "t" << l.test + 1;
  os << '\n';
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    os << 'a' << d.labels[i].analysis + 1 << 't' << d.labels[i].test + 1 << ',' << d.mean(i);
    for (std::size_t j = 0; j < d.labels.size(); ++j) os << ',' << d.corr(i, j);
    os << '\n';
  }
  return os.str();
}

}  // namespace nphgsd
