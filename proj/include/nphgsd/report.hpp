#pragma once
#include <string>

#include "nphgsd/ahr.hpp"
#include "nphgsd/dist.hpp"
#include "nphgsd/expect.hpp"

namespace nphgsd {

// CSV tables with a header row; numbers carry four decimals except
// correlations, which keep six.
std::string to_csv(const ExpectedEvents& e);
std::string to_csv(const AhrResult& r);
std::string to_csv(const JointDistribution& d);

}  // namespace nphgsd
