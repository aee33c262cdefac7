#include "kim/uea.hpp"

namespace kim::lie {

std::vector<Rational> ad_series_coefficients(AdSeriesKind kind, unsigned upto) {
  std::vector<Rational> out(upto + 1, Rational(0));
  switch (kind) {
    case AdSeriesKind::Exp:
      for (unsigned k = 0; k <= upto; ++k) out[k] = 1 / factorial(k);
      break;
    case AdSeriesKind::Expm1OverT:
      for (unsigned k = 0; k <= upto; ++k) out[k] = 1 / factorial(k + 1);
      break;
    case AdSeriesKind::TOverExpm1: {
      TruncSeries f({"t"}, upto + 1);
      for (unsigned k = 0; k <= upto; ++k) f.set_coeff({k}, 1 / factorial(k + 1));
      TruncSeries inv = f.inverse();
      for (unsigned k = 0; k <= upto; ++k) out[k] = inv.coeff({k});
      break;
    }
  }
  return out;
}

}  // namespace kim::lie
