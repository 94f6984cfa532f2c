#pragma once

#include <string>
#include <vector>

#include "nwb/rect.hpp"

namespace nwb {

// Pixel counts behind IoU = TP / (TP + FP + FN).
struct OverlapCounts {
  long long true_positive = 0;   // |detected ∩ truth|
  long long false_positive = 0;  // |detected \ truth|
  long long false_negative = 0;  // |truth \ detected|

  long long union_area() const { return true_positive + false_positive + false_negative; }
};

OverlapCounts overlap_counts(const Rect& detected, const Rect& truth);
double iou(const Rect& detected, const Rect& truth);

struct EvalRecord {
  std::string image;
  Rect detected;
  Rect ground_truth;
  std::string label;  // none | wb | nwb
  double iou = 0.0;
};

EvalRecord make_record(std::string image, const Rect& detected, const Rect& ground_truth,
                       std::string label);

struct MeanRow {
  std::string label;
  int count = 0;
  double mean_iou = 0.0;
};

// Arithmetic mean IoU per label. Rows are ordered none, wb, nwb, then any
// other label in order of first appearance. Throws EmptyTableError on empty
// input.
std::vector<MeanRow> evaluate_batch(const std::vector<EvalRecord>& records);

// "<label_header>,count,mean_iou" followed by one row per label, IoU with
// three decimals.
std::string format_mean_table(const std::vector<MeanRow>& rows,
                              const std::string& label_header = "adjustment");

std::string format_fixed(double value, int decimals);

}  // namespace nwb
