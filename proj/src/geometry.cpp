#include "cake/geometry.hpp"

#include <string>

namespace cake {

SamplingGeometry make_geometry(int n1, int n2, int N, int d1, int d2, int B) {
  auto positive = [](int v, const char* name) {
    if (v <= 0)
      throw DimensionError(std::string("geometry: ") + name +
                           " must be positive, got " + std::to_string(v));
  };
  positive(n1, "n1");
  positive(n2, "n2");
  positive(N, "N");
  positive(d1, "d1");
  positive(d2, "d2");
  positive(B, "B");

  auto divides = [](int div, int whole, const char* dn, const char* wn) {
    if (whole % div != 0)
      throw DimensionError(std::string("geometry: ") + dn + "=" +
                           std::to_string(div) + " does not divide " + wn +
                           "=" + std::to_string(whole));
  };
  divides(d1, n1, "d1", "n1");
  divides(d2, n2, "d2", "n2");
  divides(B, N, "B", "N");

  SamplingGeometry g;
  g.n1 = n1;
  g.n2 = n2;
  g.N = N;
  g.d1 = d1;
  g.d2 = d2;
  g.B = B;
  g.m1 = n1 / d1;
  g.m2 = n2 / d2;
  g.M = N / B;
  return g;
}

}  // namespace cake
