#include "basis_factor.hpp"

#include <cmath>

#include <Eigen/SparseLU>

namespace mpb::detail {

namespace {
constexpr int kDenseLimit = 200;
constexpr double kSingularRatio = 1e-12;
}  // namespace

struct BasisFactor::Impl {
  bool dense = true;
  Eigen::PartialPivLU<Mat> dlu;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> slu;
};

BasisFactor::BasisFactor() : impl_(std::make_unique<Impl>()) {}
BasisFactor::~BasisFactor() = default;

bool BasisFactor::factorize(const SpMat& B) {
  etas_.clear();
  const int m = static_cast<int>(B.rows());
  if (m == 0) return true;
  impl_->dense = m <= kDenseLimit;
  if (impl_->dense) {
    impl_->dlu.compute(Mat(B));
    const auto d = impl_->dlu.matrixLU().diagonal().cwiseAbs();
    const double mx = d.maxCoeff();
    return mx > 0 && d.minCoeff() > kSingularRatio * mx;
  }
  impl_->slu.analyzePattern(B);
  impl_->slu.factorize(B);
  if (impl_->slu.info() != Eigen::Success) return false;
  // Guard against near-singular factors the sparse LU accepts silently.
  Vec probe = Vec::Ones(m);
  Vec x = impl_->slu.solve(probe);
  return x.allFinite() && (B * x - probe).lpNorm<Eigen::Infinity>() < 1e-6;
}

void BasisFactor::ftran(Vec& v) const {
  if (v.size() == 0) return;
  if (impl_->dense) {
    v = impl_->dlu.solve(v);
  } else {
    v = impl_->slu.solve(v);
  }
  for (const Eta& e : etas_) {
    const double vr = v[e.r] / e.pivot;
    v[e.r] = vr;
    if (vr == 0.0) continue;
    for (size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * vr;
  }
}

void BasisFactor::btran(Vec& v) const {
  if (v.size() == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->r];
    for (size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * v[it->idx[k]];
    v[it->r] = s / it->pivot;
  }
  if (impl_->dense) {
    v = impl_->dlu.transpose().solve(v);
  } else {
    v = impl_->slu.transpose().solve(v);
  }
}

void BasisFactor::push_eta(int r, const Vec& aq) {
  Eta e;
  e.r = r;
  e.pivot = aq[r];
  for (int i = 0; i < aq.size(); ++i) {
    if (i != r && aq[i] != 0.0) {
      e.idx.push_back(i);
      e.val.push_back(aq[i]);
    }
  }
  etas_.push_back(std::move(e));
}

}  // namespace mpb::detail
