#pragma once

// Dense matrix exponential by Pade-13 scaling and squaring; reference oracle
// for the splitting-order tests, independent of the integrator code.

#include <cmath>

#include <Eigen/Dense>

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  using Mat = Eigen::MatrixXd;
  const double b[] = {64764752532480000.0, 32382376266240000.0,
                      7771770303897600.0,  1187353796428800.0,
                      129060195264000.0,   10559470521600.0,
                      670442572800.0,      33522128640.0,
                      1323241920.0,        40840800.0,
                      960960.0,            16380.0,
                      182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const int n = (int)a.rows();

  double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int s = 0;
  Mat sa = a;
  if (norm > theta13) {
    s = (int)std::ceil(std::log2(norm / theta13));
    sa = a / std::exp2((double)s);
  }

  Mat id = Mat::Identity(n, n);
  Mat a2 = sa * sa;
  Mat a4 = a2 * a2;
  Mat a6 = a2 * a4;
  Mat u = sa * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                b[5] * a4 + b[3] * a2 + b[1] * id);
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
          b[2] * a2 + b[0] * id;
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}
