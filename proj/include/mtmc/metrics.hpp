#pragma once

#include <vector>

#include "mtmc/io.hpp"
#include "mtmc/types.hpp"

namespace mtmc::metrics {

struct EvalConfig {
  double iou_match_threshold = 0.5;  // frame-level box match criterion
};

// Throws config_error unless the threshold lies in (0,1].
void validate_eval_config(const EvalConfig& config);

// Optimal identity assignment between ground-truth and predicted ids.
// A GT box is covered by a predicted id when that id has a box in the
// same camera and frame with IoU >= threshold. The bipartite cost between
// identities counts uncovered boxes on both sides; dummy identities let
// ids stay unmatched at the cost of all their boxes. IDTP sums covered
// boxes under the min-cost assignment; IDFP/IDFN are the box-count
// remainders. Throws data_error when either set repeats an id inside one
// (camera, frame).
IdCounts id_assignment(const std::vector<io::TrackRow>& gt,
                       const std::vector<io::TrackRow>& pred,
                       const EvalConfig& config);

struct IdentityScores {
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
};

// idf1 = 2*idtp / (2*idtp + idfp + idfn), idp = idtp/(idtp+idfp),
// idr = idtp/(idtp+idfn); a zero denominator yields 0 for that score.
// Throws data_error on all-zero counts (empty evaluation universe).
IdentityScores idf1_idp_idr(const IdCounts& counts);

enum class DistanceKind { cosine, euclidean };

// Sum over samples of max(d(anchor, positive) - d(anchor, negative) +
// margin, 0).
double triplet_loss(const std::vector<TripletSample>& samples,
                    DistanceKind kind);

// Sum over samples of -log(probability of the true label). Throws
// data_error when that probability is 0.
double cross_entropy(const std::vector<ClassificationSample>& samples);

}  // namespace mtmc::metrics
