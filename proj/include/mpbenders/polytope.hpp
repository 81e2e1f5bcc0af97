#pragma once

#include <vector>

#include "mpbenders/linalg.hpp"

namespace mpb {

// Polytope {t : E t <= f}.
struct Polytope {
  Mat E;
  Vec f;
};

// Scales every row of E to unit L2 norm. Rows with norm below tol are
// dropped when f >= 0; otherwise the polytope is empty and false is returned.
bool normalize_rows(Polytope& p, double tol = 1e-12);

struct Ball {
  Vec center;
  double radius = 0.0;
  bool empty = true;
};

// Largest inscribed ball. `empty` is set when the polytope has no points.
Ball chebyshev_ball(const Polytope& p);

// Removes rows that no point of the polytope can make tight beyond tol.
// Returns the indices (into the input) of the kept rows.
std::vector<int> remove_redundant_rows(Polytope& p, double tol = 1e-9);

// Axis-aligned bounds of a bounded, nonempty polytope.
void bounding_box(const Polytope& p, Vec& lo, Vec& hi);

}  // namespace mpb
