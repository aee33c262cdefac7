#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kim/linalg.hpp"
#include "kim/polynomial.hpp"
#include "kim/series.hpp"

namespace kim::forms {

// Affine chart of a punctured projective line (infinity is always punctured),
// or a finite product of such.
struct ChartFactor {
  std::string var;
  std::vector<Rational> punctures;  // finite punctures; infinity implied
};

struct Chart {
  std::vector<ChartFactor> factors;

  std::vector<std::string> vars() const;
  // Total punctures of factor f, counting infinity.
  int puncture_count(size_t f) const {
    return static_cast<int>(factors[f].punctures.size()) + 1;
  }
  std::string name() const;
  // "p1(0,1,inf)", "p1(0,1,inf)^2", "p1(0,1,inf) x p1(0,2,inf)"
  static Chart parse(const std::string& text);
};

struct OneFormAtom {
  std::string name;
  std::vector<RationalFunction> coords;        // coefficients on dz_i; empty = abstract
  std::optional<RationalFunction> primitive;   // g with dg = atom, when rational
  bool backed() const { return !coords.empty(); }
};

struct TwoFormAtom {
  std::string name;
  std::map<std::pair<int, int>, RationalFunction> coords;  // dz_i ^ dz_j with i < j
  bool backed = false;
};

struct CoordOneForm {
  std::vector<RationalFunction> c;  // per chart variable
  bool is_zero() const;
};

struct CoordTwoForm {
  std::map<std::pair<int, int>, RationalFunction> c;  // keys i < j
  void add(int i, int j, const RationalFunction& v);
  bool is_zero() const;
};

// Finitely presented space of global one- and two-forms: named atoms with a
// rational exterior-derivative matrix and wedge table. Coordinate-backed atoms
// additionally support calculus with rational-function coefficients.
class FormSpace {
public:
  static std::shared_ptr<const FormSpace> for_chart(const Chart& chart);
  // Same, plus coordinate differentials dz_i (exact atoms), monomial
  // multiples listed as (monomial, variable) pairs, and the plain coordinate
  // wedge two-atoms needed to close d over them. With `plain_wedges` false the
  // monomial atoms are declared without their d-images, which is the
  // NotClosedUnderD situation.
  static std::shared_ptr<const FormSpace> for_chart_extended(
      const Chart& chart, bool coordinate_atoms, bool plain_wedges,
      const std::vector<std::pair<Polynomial, size_t>>& monomial_atoms = {});

  // Clone of `base` with one abstract atom appended, its d-image declared.
  static std::shared_ptr<const FormSpace> with_abstract_atom(
      const std::shared_ptr<const FormSpace>& base, const std::string& name, const VecQ& d_image);

  // Fully abstract space from explicit tables.
  static std::shared_ptr<const FormSpace> from_tables(
      std::vector<std::string> one_names, std::vector<std::string> two_names,
      const std::vector<std::optional<VecQ>>& d_images,
      const std::map<std::pair<int, int>, VecQ>& wedges);

  const Chart& chart() const { return chart_; }
  const std::vector<std::string>& vars() const { return vars_; }
  size_t n1() const { return one_.size(); }
  size_t n2() const { return two_.size(); }
  const OneFormAtom& one_atom(size_t i) const { return one_[i]; }
  const TwoFormAtom& two_atom(size_t i) const { return two_[i]; }
  int atom_index(const std::string& name) const;

  // d(atom i) as a rational vector over two-atoms; nullopt when the image
  // leaves the declared span.
  const std::optional<VecQ>& d_image(size_t i) const { return d_img_[i]; }
  // wedge(atom i, atom j); nullopt when undeclared/unrepresentable.
  std::optional<VecQ> wedge_image(size_t i, size_t j) const;

  // Q-rows over atoms spanning the exact forms (atoms with primitives).
  MatQ exact_atom_rows() const;

  bool fully_backed() const;

private:
  Chart chart_;
  std::vector<std::string> vars_;
  std::vector<OneFormAtom> one_;
  std::vector<TwoFormAtom> two_;
  std::vector<std::optional<VecQ>> d_img_;
  std::map<std::pair<int, int>, std::optional<VecQ>> wedge_;  // keys i < j

  void finalize();  // computes tables for backed atoms, validates
  // Expresses a coordinate two-form as a Q-combination of two-atoms.
  std::optional<VecQ> express_two_form(const CoordTwoForm& w) const;
  
};

using FormSpacePtr = std::shared_ptr<const FormSpace>;

// Differential form of degree 0, 1 or 2. Degree-1/2 forms carry an atom part
// (rational-function coefficients over atoms) plus a free coordinate part.
class DifferentialForm {
public:
  DifferentialForm() = default;
  static DifferentialForm function(FormSpacePtr s, RationalFunction f);
  static DifferentialForm zero(FormSpacePtr s, int degree);
  static DifferentialForm atom(FormSpacePtr s, size_t index, int degree = 1);
  static DifferentialForm one_form(FormSpacePtr s, std::vector<RationalFunction> atom_coeffs);
  static DifferentialForm from_q_vector(FormSpacePtr s, const VecQ& atoms, int degree = 1);
  static DifferentialForm coord_one_form(FormSpacePtr s, CoordOneForm c);

  int degree() const { return degree_; }
  const FormSpacePtr& space() const { return space_; }
  const RationalFunction& f0() const { return f0_; }
  const std::vector<RationalFunction>& atom_coeffs() const { return atom_; }
  const CoordOneForm& coord1() const { return coord1_; }
  const CoordTwoForm& coord2() const { return coord2_; }

  bool is_zero() const;
  DifferentialForm operator+(const DifferentialForm& o) const;
  DifferentialForm operator-(const DifferentialForm& o) const;
  DifferentialForm scaled(const RationalFunction& f) const;
  bool operator==(const DifferentialForm& o) const { return (*this - o).is_zero(); }

  // Coordinate expansion (backed atoms only; abstract coefficients must be 0).
  CoordOneForm coords_one() const;
  CoordTwoForm coords_two() const;

  // Q-vector over atoms when the form is a constant atom combination with no
  // coordinate part; nullopt otherwise.
  std::optional<VecQ> as_q_atoms() const;

  std::string str() const;

private:
  int degree_ = 0;
  FormSpacePtr space_;
  RationalFunction f0_;
  std::vector<RationalFunction> atom_;  // degree 1: over one-atoms; degree 2: over two-atoms
  CoordOneForm coord1_;
  CoordTwoForm coord2_;

  friend DifferentialForm d(const DifferentialForm&);
  friend DifferentialForm wedge(const DifferentialForm&, const DifferentialForm&);
};

DifferentialForm d(const DifferentialForm& form);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

// Coefficient-wise Taylor expansion of a one-form at a pole-free base point:
// components over the shifted coordinate differentials.
struct SeriesOneForm {
  std::vector<TruncSeries> comps;
  bool is_zero() const;
  size_t nonzero_coefficients() const;
};

SeriesOneForm jet_expand_form(const DifferentialForm& form, const std::vector<Rational>& base,
                              unsigned order);

}  // namespace kim::forms
