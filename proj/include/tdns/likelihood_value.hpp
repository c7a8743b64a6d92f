#pragma once

#include <limits>

namespace tdns {

// A log-likelihood paired with a uniform tiebreak value. The pair is totally
// ordered, so likelihood plateaus still compress: constraining the tiebreak
// shrinks prior mass even where log_l is flat.
struct LikelihoodValue {
  double log_l = -std::numeric_limits<double>::infinity();
  double tiebreak = 0.0;
};

inline bool operator>(const LikelihoodValue& a, const LikelihoodValue& b) {
  if (a.log_l != b.log_l) return a.log_l > b.log_l;
  return a.tiebreak > b.tiebreak;
}

inline bool operator<(const LikelihoodValue& a, const LikelihoodValue& b) {
  return b > a;
}

inline bool operator==(const LikelihoodValue& a, const LikelihoodValue& b) {
  return a.log_l == b.log_l && a.tiebreak == b.tiebreak;
}

}  // namespace tdns
