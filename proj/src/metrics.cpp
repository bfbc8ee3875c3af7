#include "hoalign/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hoalign/error.hpp"

namespace hoalign {

namespace {

double mean_nearest_squared(std::span<const Vec3> queries, const NearestNeighborIndex& index) {
  double sum = 0.0;
  for (const Vec3& q : queries) sum += index.nearest(q).squared_distance;
  return sum / static_cast<double>(queries.size());
}

double inlier_fraction(std::span<const Vec3> queries, const NearestNeighborIndex& index, double threshold) {
  const double t2 = threshold * threshold;
  std::size_t inliers = 0;
  for (const Vec3& q : queries) {
    if (index.nearest(q).squared_distance <= t2) ++inliers;
  }
  return static_cast<double>(inliers) / static_cast<double>(queries.size());
}

FScore make_fscore(double p, double r) {
  return {p, r, p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0};
}

}  // namespace

double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::kEmptyCloud, "chamfer distance of an empty set");
  if (a.size() != b.size()) {
    fail(ErrorKind::kSizeMismatch, "chamfer distance needs equal sizes, got " + std::to_string(a.size()) +
                                       " and " + std::to_string(b.size()));
  }
  const NearestNeighborIndex index_a(a), index_b(b);
  const double ab = mean_nearest_squared(a, index_b);
  const double ba = mean_nearest_squared(b, index_a);
  // Fixed (a->b) + (b->a) order with scaling applied per term keeps CD(a, b) == CD(b, a).
  return kSquaredMetersToSquaredCm * ab + kSquaredMetersToSquaredCm * ba;
}

double chamfer_distance(const PointCloud& a, const PointCloud& b) { return chamfer_distance(a.points(), b.points()); }

FScore f_score(std::span<const Vec3> pred, std::span<const Vec3> gt, double threshold) {
  if (pred.empty() || gt.empty()) fail(ErrorKind::kEmptyCloud, "f-score of an empty set");
  if (!(threshold > 0.0)) fail(ErrorKind::kInvalidArgument, "f-score threshold must be positive");
  const NearestNeighborIndex pred_index(pred), gt_index(gt);
  return make_fscore(inlier_fraction(pred, gt_index, threshold), inlier_fraction(gt, pred_index, threshold));
}

FScore f_score(const PointCloud& pred, const PointCloud& gt, double threshold) {
  return f_score(pred.points(), gt.points(), threshold);
}

MetricReport evaluate_point_sets(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  MetricReport r;
  r.chamfer_cm2 = chamfer_distance(pred, gt);
  const NearestNeighborIndex pred_index(pred), gt_index(gt);
  const FScore f5 = make_fscore(inlier_fraction(pred, gt_index, 0.005), inlier_fraction(gt, pred_index, 0.005));
  const FScore f10 = make_fscore(inlier_fraction(pred, gt_index, 0.010), inlier_fraction(gt, pred_index, 0.010));
  r.f5 = f5.f;
  r.precision_5mm = f5.precision;
  r.recall_5mm = f5.recall;
  r.f10 = f10.f;
  r.precision_10mm = f10.precision;
  r.recall_10mm = f10.recall;
  return r;
}

MetricReport median_metrics(std::span<const MetricReport> reports) {
  if (reports.empty()) fail(ErrorKind::kEmptyList, "median of no metric reports");
  auto lower_median = [&](double MetricReport::*field) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(r.*field);
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
  };
  MetricReport m;
  for (auto field : {&MetricReport::chamfer_cm2, &MetricReport::f5, &MetricReport::f10, &MetricReport::precision_5mm,
                     &MetricReport::recall_5mm, &MetricReport::precision_10mm, &MetricReport::recall_10mm}) {
    m.*field = lower_median(field);
  }
  return m;
}

SimilarityTransform fit_similarity(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) fail(ErrorKind::kSizeMismatch, "similarity fit needs paired points");
  if (src.size() < 3) fail(ErrorKind::kDegenerateGeometry, "similarity fit needs at least 3 pairs");
  const Vec3 mu_src = mean_point(src);
  const Vec3 mu_dst = mean_point(dst);
  const double n = static_cast<double>(src.size());
  Mat3 cov = Mat3::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - mu_src;
    cov += (dst[i] - mu_dst) * a.transpose();
    var_src += a.squaredNorm();
  }
  cov /= n;
  var_src /= n;

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(var_src > 0.0) || !(sv[1] > 1e-12 * sv[0])) {
    fail(ErrorKind::kDegenerateGeometry, "correspondence covariance is rank-deficient");
  }
  Vec3 d = Vec3::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) d[2] = -1.0;
  const Mat3 rot = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  const double scale = sv.dot(d) / var_src;
  if (!(scale > 0.0)) fail(ErrorKind::kDegenerateGeometry, "similarity fit produced non-positive scale");
  const Vec3 t = mu_dst - scale * (rot * mu_src);
  return SimilarityTransform(Quat(rot), t, scale);
}

namespace {

double pair_rms(std::span<const Vec3> a, std::span<const Vec3> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(a.size()));
}

}  // namespace

IcpResult icp_with_scaling(std::span<const Vec3> source, std::span<const Vec3> target, const IcpOptions& options) {
  if (source.size() < 3 || target.size() < 3) fail(ErrorKind::kDegenerateGeometry, "ICP needs at least 3 points per set");
  if (options.correspondence == Correspondence::kIndex && source.size() != target.size()) {
    fail(ErrorKind::kSizeMismatch, "index correspondences need equal sizes");
  }
  const NearestNeighborIndex target_index(target);
  std::vector<Vec3> current(source.begin(), source.end());
  std::vector<Vec3> matched(current.size());

  auto correspond = [&] {
    if (options.correspondence == Correspondence::kIndex) {
      std::copy(target.begin(), target.end(), matched.begin());
    } else {
      for (std::size_t i = 0; i < current.size(); ++i) matched[i] = target[target_index.nearest(current[i]).index];
    }
    return pair_rms(current, matched);
  };

  IcpResult result;
  double rms = correspond();
  result.rms_history.push_back(rms);
  for (std::size_t it = 0; it < options.max_iters; ++it) {
    const SimilarityTransform step = fit_similarity(current, matched);
    current = apply_pose(std::span<const Vec3>(current), step);
    result.transform = step * result.transform;
    result.iterations = it + 1;
    const double next = correspond();
    result.rms_history.push_back(next);
    const double improvement = rms - next;
    rms = next;
    if (improvement < options.tol) break;
  }
  return result;
}

}  // namespace hoalign
