#pragma once

#include <memory>
#include <vector>

#include "mpbenders/linalg.hpp"

namespace mpb::detail {

// LU factors of a simplex basis plus a product-form update file. Small bases
// use a dense partial-pivot LU, larger ones a sparse LU.
class BasisFactor {
 public:
  BasisFactor();
  ~BasisFactor();
  BasisFactor(const BasisFactor&) = delete;
  BasisFactor& operator=(const BasisFactor&) = delete;

  // Returns false when the basis is (numerically) singular.
  bool factorize(const SpMat& B);
  // v <- B^{-1} v
  void ftran(Vec& v) const;
  // v <- B^{-T} v
  void btran(Vec& v) const;
  // Records the replacement of basis column r by a column whose FTRAN is aq.
  void push_eta(int r, const Vec& aq);
  int num_etas() const { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int r;
    double pivot;
    std::vector<int> idx;
    std::vector<double> val;
  };
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<Eta> etas_;
};

}  // namespace mpb::detail
