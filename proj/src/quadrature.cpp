#include "sfeec/quadrature.hpp"

namespace sfeec {

namespace {

struct GL {
  int n;
  double x[5], w[5];  // on [-1, 1]
};

const GL kGauss[5] = {
    {1, {0}, {2}},
    {2, {-0.5773502691896257645, 0.5773502691896257645}, {1, 1}},
    {3,
     {-0.7745966692414833770, 0, 0.7745966692414833770},
     {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}},
    {4,
     {-0.8611363115940525752, -0.3399810435848562648, 0.3399810435848562648,
      0.8611363115940525752},
     {0.3478548451374538574, 0.6521451548625461426, 0.6521451548625461426,
      0.3478548451374538574}},
    {5,
     {-0.9061798459386639928, -0.5384693101056830910, 0,
      0.5384693101056830910, 0.9061798459386639928},
     {0.2369268850561890875, 0.4786286704993664680, 0.5688888888888888889,
      0.4786286704993664680, 0.2369268850561890875}},
};

void push_orbit3(QuadratureRule& r, double a, double w) {
  // barycentric orbit (1-2a, a, a); reference coordinates are (l1, l2)
  double b = 1.0 - 2.0 * a;
  r.points.push_back({a, a, 0});
  r.points.push_back({b, a, 0});
  r.points.push_back({a, b, 0});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

void push_orbit6(QuadratureRule& r, double l0, double l1, double w) {
  double l2 = 1.0 - l0 - l1;
  const double bary[6][3] = {{l0, l1, l2}, {l0, l2, l1}, {l1, l0, l2},
                             {l1, l2, l0}, {l2, l0, l1}, {l2, l1, l0}};
  for (const auto& b : bary) {
    r.points.push_back({b[1], b[2], 0});
    r.weights.push_back(w);
  }
}

QuadratureRule triangle_rule(int order) {
  QuadratureRule r;
  r.cell_kind = CellKind::Simplex;
  r.order = order;
  const double half = 0.5;
  switch (order) {
    case 0:
    case 1:
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 0});
      r.weights.push_back(half);
      break;
    case 2:
      push_orbit3(r, 1.0 / 6.0, half / 3.0);
      break;
    case 3:
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 0});
      r.weights.push_back(-27.0 / 96.0);
      push_orbit3(r, 0.2, 25.0 / 96.0);
      break;
    case 4:
      push_orbit3(r, 0.445948490915965, half * 0.223381589678011);
      push_orbit3(r, 0.091576213509771, half * 0.109951743655322);
      break;
    case 5:
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 0});
      r.weights.push_back(half * 0.225);
      push_orbit3(r, 0.470142064105115, half * 0.132394152788506);
      push_orbit3(r, 0.101286507323456, half * 0.125939180544827);
      break;
    case 6:
      push_orbit3(r, 0.249286745170910, half * 0.116786275726379);
      push_orbit3(r, 0.063089014491502, half * 0.050844906370207);
      push_orbit6(r, 0.310352451033785, 0.053145049844816,
                  half * 0.082851075618374);
      break;
    default:
      throw InvalidParameter("triangle quadrature: order must be <= 6");
  }
  return r;
}

QuadratureRule cube_rule(int order) {
  int n = order / 2 + 1;
  if (order < 0 || n > 5)
    throw InvalidParameter("cube quadrature: order must be <= 9");
  const GL& g = kGauss[n - 1];
  QuadratureRule r;
  r.cell_kind = CellKind::Cube;
  r.order = 2 * n - 1;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        r.points.push_back({0.5 * (g.x[i] + 1.0), 0.5 * (g.x[j] + 1.0),
                            0.5 * (g.x[k] + 1.0)});
        r.weights.push_back(0.125 * g.w[i] * g.w[j] * g.w[k]);
      }
  return r;
}

}  // namespace

QuadratureRule quadrature_rule(CellKind kind, int order) {
  return kind == CellKind::Simplex ? triangle_rule(order) : cube_rule(order);
}

QuadratureRule segment_rule(int order) {
  int n = order / 2 + 1;
  if (order < 0 || n > 5)
    throw InvalidParameter("segment quadrature: order must be <= 9");
  const GL& g = kGauss[n - 1];
  QuadratureRule r;
  r.cell_kind = CellKind::Simplex;
  r.order = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    r.points.push_back({0.5 * (g.x[i] + 1.0), 0, 0});
    r.weights.push_back(0.5 * g.w[i]);
  }
  return r;
}

}  // namespace sfeec
