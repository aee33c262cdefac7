#pragma once

#include <vector>

#include "kim/connection.hpp"
#include "kim/uea.hpp"

namespace kim::transport {

// Logarithm of the horizontal section: Hall coordinates with series
// coefficients in the chart variables shifted to the base point. J(base) = 0.
struct HorizontalLog {
  lie::LieContextPtr ctx;
  std::vector<Rational> base;
  int depth = 0;
  unsigned order = 0;
  lie::LieElement<TruncSeries> j;
  lie::UEAElement<TruncSeries> exp_j;
};

// Solves d exp(J) = omega exp(J) degree by degree with J(base) = 0.
HorizontalLog solve_j(const conn::ReducedConnection& universal, const std::vector<Rational>& base,
                      unsigned order);

// Independent cross-check of the Lie-side equation
// dJ = (ad_J / (e^{ad_J} - 1))(omega); returns the coefficient mismatch count.
size_t lie_ode_cross_check(const conn::ReducedConnection& universal, const HorizontalLog& h);

// Delta(exp J) - exp J (x) exp J; count of nonzero residual coefficients.
size_t verify_grouplike(const HorizontalLog& h);
size_t verify_grouplike(const lie::UEAElement<TruncSeries>& u);

// d exp(J) - omega exp(J) through order - 1; count of nonzero coefficients.
size_t verify_horizontality(const conn::ReducedConnection& universal, const HorizontalLog& h);

// One-forms on L_n x Z with rational-function coefficients over the
// differentials dt_1..dt_r, dz_1..dz_k (variables t1..tr, then chart vars).
struct MixedOneForm {
  std::vector<RationalFunction> c;
  bool is_zero() const;
};

struct MixedTwoForm {
  std::map<std::pair<int, int>, RationalFunction> c;
  void add(int i, int j, const RationalFunction& v);
  bool is_zero() const;
};

struct ThetaSystem {
  lie::LieContextPtr ctx;
  forms::FormSpacePtr space;
  std::vector<std::string> vars;        // t1..tr then chart vars
  size_t lie_dim = 0;                   // r; differentials 0..r-1 are dt
  std::vector<MixedOneForm> theta;      // theta~_k per basis index
  std::vector<MixedOneForm> omega;      // omega_k in mixed coordinates
};

// theta~ = ((e^{ad_t} - 1)/ad_t)(dt) - omega with exact polynomial
// coefficients in the Lie coordinates.
ThetaSystem compute_theta(const conn::ReducedConnection& universal);

// Residual of d theta~_k - sum b_ijk theta~_i ^ (1/2 theta~_j + omega_j).
std::vector<MixedTwoForm> theta_identity_residual(const ThetaSystem& ts);
size_t mixed_nonzero_count(const std::vector<MixedTwoForm>& residual);

// Pullback of every theta~_k along the graph of J (substitute t = J(z)):
// series one-forms over the shifted chart differentials. All must vanish.
std::vector<forms::SeriesOneForm> pullback_theta_along_graph(const ThetaSystem& ts,
                                                             const HorizontalLog& h);

// Inverse of a unipotent-plus-positive-valuation element.
lie::UEAElement<TruncSeries> uea_series_inverse(const lie::UEAElement<TruncSeries>& u);

// exp(J) F^{-1}: the local unipotent Albanese map with Hodge section F
// (group-like, F(base) = 1). NotGroupLike when F fails its contract.
lie::UEAElement<TruncSeries> albanese_local(const HorizontalLog& h,
                                            const lie::UEAElement<TruncSeries>& f_section);

}  // namespace kim::transport
