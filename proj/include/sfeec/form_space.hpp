#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sfeec/mesh.hpp"
#include "sfeec/quadrature.hpp"

namespace sfeec {

// Finite element families: cubical generalized Whitney forms (face-averaged
// degrees of freedom) and the simplicial trimmed families of first and second
// order (integral degrees of freedom).
enum class Family { Q1, P1, P2 };

const char* family_name(Family f);
Family family_from_name(const std::string& s);

struct AnalyticForm {
  int dim = 0;
  int p = 0;
  int smoothness = 1000;  // continuous derivatives; informational
  // component functions; count = C(dim, p), ordered (dx, dy, dz) for 1-forms
  // and (dy^dz, dz^dx, dx^dy) for 2-forms in 3-D
  std::vector<std::function<double(const Vec3&)>> comp;

  void eval(const Vec3& x, double* out) const {
    for (size_t i = 0; i < comp.size(); ++i) out[i] = comp[i](x);
  }
};

int form_components(int dim, int p);

struct DofKey {
  int entity_dim = 0;
  int entity_id = 0;
  int local = 0;
};

class FormSpace {
 public:
  const PeriodicMesh* mesh = nullptr;
  Family family = Family::P1;
  int p = 0;
  int n_dofs = 0;
  int components = 0;
  int local_dofs = 0;
  std::vector<DofKey> dof_table;

  // cell -> global dof ids, fixed local order (see element conventions)
  std::vector<int> cell_dofs;  // n_cells x local_dofs

  // Reference values of all local basis forms at a reference point
  // (row-major local_dofs x components). Identical for every cell.
  void eval_basis_ref(const Vec3& ref, double* out) const;

  // Physical values on a given cell (applies the per-cell transform).
  void eval_basis(int cell, const Vec3& ref, double* out) const;

  // Transform reference component values in place for `count` stacked forms.
  void to_physical(int cell, double* vals, int count) const;

  // Lebesgue volume scale of a cell (|det J| for simplices, cell volume for
  // cubes); the signed Jacobian is used by oriented-integral functionals.
  double jac_abs(int cell) const { return std::abs(cell_det_[(size_t)cell]); }
  double jac_signed(int cell) const { return cell_det_[(size_t)cell]; }

  // Apply the degree-of-freedom functional `gdof` to an arbitrary physical
  // form (callback fills `components` values at a point).
  double apply_dof(
      int gdof, const std::function<void(const Vec3&, double*)>& form,
      int quad_order) const;

  int n_cells() const { return mesh->n_cells(); }
  const int* cell_dof_ids(int cell) const {
    return cell_dofs.data() + (size_t)cell * (size_t)local_dofs;
  }

 private:
  friend FormSpace build_space(const PeriodicMesh&, Family, int);
  // simplicial per-cell geometry
  std::vector<double> cell_invjt_;  // 4 per cell
  std::vector<double> cell_det_;    // signed det J (simplex) or cell volume
  void build_tables();
};

FormSpace build_space(const PeriodicMesh& mesh, Family family, int p);

struct Cochain {
  const FormSpace* space = nullptr;
  std::vector<double> values;
  enum class Rep { Plain, MassWeighted } rep = Rep::Plain;
};

Cochain canonical_projection(const FormSpace& space, const AnalyticForm& form,
                             int quad_order = 6);

}  // namespace sfeec
