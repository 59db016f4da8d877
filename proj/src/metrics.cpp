#include "mtmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "mtmc/assignment.hpp"
#include "mtmc/errors.hpp"

namespace mtmc::metrics {

namespace {

// Per-identity boxes indexed by (camera, frame); duplicate slots rejected.
using Slot = std::pair<std::string, std::int64_t>;

struct IdentitySet {
  std::vector<std::int64_t> ids;                      // distinct, sorted
  std::map<std::int64_t, std::map<Slot, BBox>> boxes;  // id -> slot -> box
  std::int64_t total_boxes = 0;
};

IdentitySet collect(const std::vector<io::TrackRow>& rows, const char* side) {
  IdentitySet out;
  for (const io::TrackRow& r : rows) {
    auto& slots = out.boxes[r.id];
    if (!slots.emplace(Slot{r.camera_id, r.frame}, r.bbox).second) {
      throw data_error(std::string(side) + ": duplicate id " +
                       std::to_string(r.id) + " in camera " + r.camera_id +
                       " frame " + std::to_string(r.frame));
    }
    out.total_boxes += 1;
  }
  for (const auto& [id, slots] : out.boxes) out.ids.push_back(id);
  return out;
}

// Never chosen by the optimum (own-dummy diagonals always beat it) but
// keeps the matrix finite. Integer-valued so mixed sums stay exact.
constexpr double kBlocked = 1e12;

}  // namespace

void validate_eval_config(const EvalConfig& config) {
  if (!(config.iou_match_threshold > 0.0 &&
        config.iou_match_threshold <= 1.0)) {
    throw config_error("iou_match_threshold out of range (0,1]");
  }
}

IdCounts id_assignment(const std::vector<io::TrackRow>& gt,
                       const std::vector<io::TrackRow>& pred,
                       const EvalConfig& config) {
  validate_eval_config(config);
  const IdentitySet g = collect(gt, "gt");
  const IdentitySet p = collect(pred, "pred");
  const std::size_t ng = g.ids.size();
  const std::size_t np = p.ids.size();

  IdCounts counts;
  counts.idfn = g.total_boxes;
  counts.idfp = p.total_boxes;
  if (ng == 0 || np == 0) return counts;

  // Covered-box counts per identity pair, via per-slot box comparison.
  // Index boxes by slot once so only co-located pairs are tested.
  std::map<Slot, std::vector<std::pair<std::size_t, const BBox*>>> pred_at;
  for (std::size_t j = 0; j < np; ++j) {
    for (const auto& [slot, box] : p.boxes.at(p.ids[j])) {
      pred_at[slot].emplace_back(j, &box);
    }
  }
  std::vector<std::vector<std::int64_t>> covered(
      ng, std::vector<std::int64_t>(np, 0));
  for (std::size_t i = 0; i < ng; ++i) {
    for (const auto& [slot, box] : g.boxes.at(g.ids[i])) {
      const auto it = pred_at.find(slot);
      if (it == pred_at.end()) continue;
      for (const auto& [j, pbox] : it->second) {
        if (geom::iou(box, *pbox) >= config.iou_match_threshold) {
          covered[i][j] += 1;
        }
      }
    }
  }

  const auto gt_size = [&](std::size_t i) {
    return static_cast<std::int64_t>(g.boxes.at(g.ids[i]).size());
  };
  const auto pred_size = [&](std::size_t j) {
    return static_cast<std::int64_t>(p.boxes.at(p.ids[j]).size());
  };

  // Square cost over real + dummy identities: dummies absorb unmatched
  // ids at the cost of all their boxes.
  const std::size_t n = ng + np;
  assign::CostMatrix cost(n, n, kBlocked);
  for (std::size_t i = 0; i < ng; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      cost.at(i, j) = static_cast<double>(gt_size(i) + pred_size(j) -
                                          2 * covered[i][j]);
    }
    cost.at(i, np + i) = static_cast<double>(gt_size(i));
  }
  for (std::size_t j = 0; j < np; ++j) {
    cost.at(ng + j, j) = static_cast<double>(pred_size(j));
  }
  for (std::size_t r = ng; r < n; ++r) {
    for (std::size_t c = np; c < n; ++c) cost.at(r, c) = 0.0;
  }

  const std::vector<int> row_to_col = assign::solve_min_cost(cost);
  std::int64_t idtp = 0;
  for (std::size_t i = 0; i < ng; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && static_cast<std::size_t>(j) < np) {
      idtp += covered[i][static_cast<std::size_t>(j)];
    }
  }
  counts.idtp = idtp;
  counts.idfp = p.total_boxes - idtp;
  counts.idfn = g.total_boxes - idtp;
  return counts;
}

IdentityScores idf1_idp_idr(const IdCounts& counts) {
  if (counts.idtp < 0 || counts.idfp < 0 || counts.idfn < 0) {
    throw data_error("identity counts must be non-negative");
  }
  if (counts.idtp == 0 && counts.idfp == 0 && counts.idfn == 0) {
    throw data_error("empty evaluation universe");
  }
  const double tp = static_cast<double>(counts.idtp);
  const double fp = static_cast<double>(counts.idfp);
  const double fn = static_cast<double>(counts.idfn);
  IdentityScores s;
  s.idf1 = 2.0 * tp / (2.0 * tp + fp + fn);
  s.idp = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  s.idr = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  return s;
}

namespace {

double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                DistanceKind kind) {
  if (kind == DistanceKind::euclidean) return (a - b).norm();
  const double na = a.norm();
  const double nb = b.norm();
  if (na <= 0.0 || nb <= 0.0) {
    throw data_error("cosine distance undefined for zero-norm vector");
  }
  return 1.0 - a.dot(b) / (na * nb);
}

}  // namespace

double triplet_loss(const std::vector<TripletSample>& samples,
                    DistanceKind kind) {
  double total = 0.0;
  for (const TripletSample& s : samples) {
    validate_triplet_sample(s);
    const double dp = distance(s.anchor, s.positive, kind);
    const double dn = distance(s.anchor, s.negative, kind);
    total += std::max(dp - dn + s.margin, 0.0);
  }
  return total;
}

double cross_entropy(const std::vector<ClassificationSample>& samples) {
  double total = 0.0;
  for (const ClassificationSample& s : samples) {
    validate_classification_sample(s);
    const double py = s.probabilities[static_cast<std::size_t>(s.label)];
    if (py <= 0.0) {
      throw data_error("probability of the true label is zero");
    }
    total += -std::log(py);
  }
  return total;
}

}  // namespace mtmc::metrics
