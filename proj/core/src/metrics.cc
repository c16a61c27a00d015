#include "depthkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

namespace depthkit {
namespace {

constexpr double kMinSide = 0.05;  // meters
constexpr double kMinAngle = 15.0 * std::numbers::pi / 180.0;
constexpr double kMaxAngle = 150.0 * std::numbers::pi / 180.0;
constexpr std::size_t kAttemptsPerTriplet = 10;

double AngleBetween(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

bool WellConditioned(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                     const Eigen::Vector3d& r) {
  const Eigen::Vector3d pq = q - p, pr = r - p, qr = r - q;
  if (pq.norm() < kMinSide || pr.norm() < kMinSide || qr.norm() < kMinSide) {
    return false;
  }
  const double angles[3] = {AngleBetween(pq, pr), AngleBetween(-pq, qr),
                            AngleBetween(-pr, -qr)};
  return std::all_of(std::begin(angles), std::end(angles), [](double a) {
    return a >= kMinAngle && a <= kMaxAngle;
  });
}

Eigen::Vector3d PlaneNormal(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                            const Eigen::Vector3d& r) {
  return (q - p).cross(r - p).normalized();
}

}  // namespace

double MetricReport::delta_at(double tau) const {
  for (const auto& [t, fraction] : delta) {
    if (t == tau) return fraction;
  }
  throw std::out_of_range("MetricReport: no delta for requested tau");
}

MetricReport EvalPair(const DepthMap& pred, const DepthMap& gt,
                      std::span<const double> taus,
                      const std::optional<VirtualNormalOptions>& vn) {
  RequireSameShape(pred, gt, "EvalPair");
  double abs_rel = 0.0, abs_err = 0.0, sq_err = 0.0;
  std::vector<std::size_t> hits(taus.size(), 0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double g = gt[i], p = pred[i];
    if (!(g > 0.0 && p > 0.0)) continue;
    const double err = std::abs(p - g);
    abs_rel += err / g;
    abs_err += err;
    sq_err += err * err;
    const double ratio = std::max(p / g, g / p);
    for (std::size_t t = 0; t < taus.size(); ++t) hits[t] += ratio < taus[t];
    ++n;
  }
  if (n == 0) throw std::invalid_argument("EvalPair: no pixel is valid in both maps");

  MetricReport report;
  const auto count = static_cast<double>(n);
  report.absrel = abs_rel / count;
  report.mae = abs_err / count;
  report.rmse = std::sqrt(sq_err / count);
  report.n_eval = n;
  for (std::size_t t = 0; t < taus.size(); ++t) {
    report.delta.emplace_back(taus[t], static_cast<double>(hits[t]) / count);
  }
  if (vn) {
    report.vn_angle =
        VirtualNormalDivergence(pred, gt, vn->intrinsics, vn->n_triplets, vn->seed);
  }
  return report;
}

double VirtualNormalDivergence(const DepthMap& pred, const DepthMap& gt,
                               const CameraIntrinsics& k, std::size_t n_triplets,
                               Seed seed, std::vector<Triplet>* accepted) {
  RequireSameShape(pred, gt, "VirtualNormalDivergence");
  k.Validate();
  if (n_triplets == 0) {
    throw std::invalid_argument("VirtualNormalDivergence: n_triplets must be >= 1");
  }
  std::vector<std::size_t> joint;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt.valid(i) && pred.valid(i)) joint.push_back(i);
  }
  if (joint.size() < 3) {
    throw std::invalid_argument(
        "VirtualNormalDivergence: need at least 3 jointly valid pixels");
  }
  const int w = gt.width();
  auto point = [&](const DepthMap& d, std::size_t i) {
    return Unproject(k, static_cast<double>(i % w), static_cast<double>(i / w), d[i]);
  };

  Rng rng(seed);
  if (accepted) accepted->clear();
  double sum = 0.0;
  std::size_t used = 0;
  const std::size_t max_attempts = kAttemptsPerTriplet * n_triplets;
  for (std::size_t attempt = 0; attempt < max_attempts && used < n_triplets; ++attempt) {
    // Three distinct positions via a partial Fisher-Yates draw.
    const std::size_t n = joint.size();
    std::size_t ia = rng.UniformIndex(n);
    std::size_t ib = rng.UniformIndex(n - 1);
    std::size_t ic = rng.UniformIndex(n - 2);
    if (ib >= ia) ++ib;
    const std::size_t lo = std::min(ia, ib), hi = std::max(ia, ib);
    if (ic >= lo) ++ic;
    if (ic >= hi) ++ic;
    const std::size_t a = joint[ia], b = joint[ib], c = joint[ic];

    const Eigen::Vector3d ga = point(gt, a), gb = point(gt, b), gc = point(gt, c);
    if (!WellConditioned(ga, gb, gc)) continue;
    const Eigen::Vector3d n_gt = PlaneNormal(ga, gb, gc);
    const Eigen::Vector3d n_pred = PlaneNormal(point(pred, a), point(pred, b), point(pred, c));
    if (!n_pred.allFinite()) continue;
    // Normals are unoriented: fold the angle into [0, pi/2].
    sum += std::atan2(n_gt.cross(n_pred).norm(), std::abs(n_gt.dot(n_pred)));
    ++used;
    if (accepted) accepted->push_back({a, b, c});
  }
  if (used == 0) {
    throw std::invalid_argument(
        "VirtualNormalDivergence: no well-conditioned triplet found");
  }
  return sum / static_cast<double>(used);
}

MetricReport Aggregate(std::span<const MetricReport> reports) {
  if (reports.empty()) throw std::invalid_argument("Aggregate: no reports");
  MetricReport out;
  out.delta = reports.front().delta;
  for (auto& [tau, fraction] : out.delta) fraction = 0.0;
  bool all_vn = true;
  double vn_sum = 0.0;
  for (const MetricReport& r : reports) {
    if (r.delta.size() != out.delta.size()) {
      throw std::invalid_argument("Aggregate: reports use different thresholds");
    }
    out.absrel += r.absrel;
    out.mae += r.mae;
    out.rmse += r.rmse;
    for (std::size_t t = 0; t < r.delta.size(); ++t) {
      if (r.delta[t].first != out.delta[t].first) {
        throw std::invalid_argument("Aggregate: reports use different thresholds");
      }
      out.delta[t].second += r.delta[t].second;
    }
    if (r.vn_angle) {
      vn_sum += *r.vn_angle;
    } else {
      all_vn = false;
    }
    out.n_eval += r.n_eval;
  }
  const auto n = static_cast<double>(reports.size());
  out.absrel /= n;
  out.mae /= n;
  out.rmse /= n;
  for (auto& [tau, fraction] : out.delta) fraction /= n;
  if (all_vn) out.vn_angle = vn_sum / n;
  return out;
}

}  // namespace depthkit
