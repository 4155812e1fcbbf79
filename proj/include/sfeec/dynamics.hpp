#pragma once

#include <optional>

#include "sfeec/operators.hpp"

namespace sfeec {

struct UnitSystem {
  double eps0 = 1.0;
  double mu0 = 1.0;
  double c2() const { return 1.0 / (eps0 * mu0); }
};

enum class Formulation { AE, BE };
enum class SplitKind { LieTrotter, Strang };

// Phase-space point of the discrete system: (a, e) degrees of freedom, or the
// gauge-reduced (b, e) pair with b = C a.
struct FieldState {
  Formulation formulation = Formulation::AE;
  std::vector<double> first;  // a (1-form dofs) or b (2-form dofs)
  std::vector<double> e;      // mass-weighted 1-form dofs
  double time = 0;
};

// Splitting integrator for the two exactly solvable sub-systems. The inverse
// mass approximation enters through the Hamiltonian, so its symmetric part is
// what the flows see; that keeps every step symplectic no matter how crude
// the approximation is.
class SplitScheme {
 public:
  SplitScheme(SplitKind kind, double dt, const SparseOperator& q,
              const SparseOperator& c, const SparseOperator& m2,
              UnitSystem units = {}, const SparseOperator* div = nullptr,
              bool warn_cfl = true);

  SplitKind kind() const { return kind_; }
  double dt() const { return dt_; }
  const UnitSystem& units() const { return units_; }
  const SparseOperator& q_sym() const { return q_sym_; }
  const SparseOperator& curl() const { return c_; }
  const SparseOperator& curl_t() const { return ct_; }
  const SparseOperator& m2() const { return m2_; }

  // exact sub-flows; neither advances the clock
  void flow_he(FieldState& s, double dt) const;
  void flow_ha(FieldState& s, double dt) const;

  FieldState step(const FieldState& s) const;

  double energy(const FieldState& s) const;
  double gauss_residual(const FieldState& s) const;

  // dt * c * sqrt(spectral radius of Q C^T M2 C); > 2 is the warn threshold
  double cfl_number() const;

 private:
  SplitKind kind_;
  double dt_;
  UnitSystem units_;
  SparseOperator q_sym_, c_, ct_, m2_;
  std::optional<SparseOperator> div_;
  bool warn_cfl_ = true;
  mutable double cfl_cache_ = -1;
  mutable bool warned_ = false;
};

FieldState make_state(Formulation f, std::vector<double> first,
                      std::vector<double> e, double time = 0);

// Dense check that the one-step map preserves the canonical Poisson structure:
// builds the 2 N1 x 2 N1 step matrix column by column in the (a, e)
// formulation and returns max |Phi^T J Phi - J| with J scaled by 1/eps0.
double symplectic_check(const SplitScheme& scheme, int n1,
                        int max_dofs = 1200);

}  // namespace sfeec
