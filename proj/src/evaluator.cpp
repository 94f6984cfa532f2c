#include "nwb/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>

#include "nwb/error.hpp"

namespace nwb {

OverlapCounts overlap_counts(const Rect& detected, const Rect& truth) {
  const long long ix = std::max(0, std::min(detected.right(), truth.right()) -
                                       std::max(detected.x, truth.x));
  const long long iy = std::max(0, std::min(detected.bottom(), truth.bottom()) -
                                       std::max(detected.y, truth.y));
  OverlapCounts counts;
  counts.true_positive = ix * iy;
  counts.false_positive = detected.area() - counts.true_positive;
  counts.false_negative = truth.area() - counts.true_positive;
  return counts;
}

double iou(const Rect& detected, const Rect& truth) {
  const OverlapCounts c = overlap_counts(detected, truth);
  const long long u = c.union_area();
  if (u == 0) return 0.0;
  return static_cast<double>(c.true_positive) / static_cast<double>(u);
}

EvalRecord make_record(std::string image, const Rect& detected, const Rect& ground_truth,
                       std::string label) {
  EvalRecord r{std::move(image), detected, ground_truth, std::move(label), 0.0};
  r.iou = iou(detected, ground_truth);
  return r;
}

std::vector<MeanRow> evaluate_batch(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyTableError("no records to evaluate");

  std::vector<std::string> order;
  std::map<std::string, std::pair<int, double>> sums;
  for (const auto& r : records) {
    auto [it, inserted] = sums.try_emplace(r.label, 0, 0.0);
    if (inserted) order.push_back(r.label);
    it->second.first += 1;
    it->second.second += r.iou;
  }
  constexpr std::array<const char*, 3> kModeOrder{"none", "wb", "nwb"};
  auto rank = [&](const std::string& label) {
    const auto it = std::find(kModeOrder.begin(), kModeOrder.end(), label);
    return static_cast<int>(it - kModeOrder.begin());
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });

  std::vector<MeanRow> rows;
  rows.reserve(order.size());
  for (const auto& label : order) {
    const auto& [count, total] = sums.at(label);
    rows.push_back(MeanRow{label, count, total / count});
  }
  return rows;
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
  return buf.data();
}

std::string format_mean_table(const std::vector<MeanRow>& rows, const std::string& label_header) {
  std::string out = label_header + ",count,mean_iou\n";
  for (const auto& row : rows) {
    out += row.label + "," + std::to_string(row.count) + "," + format_fixed(row.mean_iou, 3) +
           "\n";
  }
  return out;
}

}  // namespace nwb
