#include "nwb/matcher.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "nwb/error.hpp"

namespace nwb {

namespace {

void check_dimensions(const ImageBuffer& query, const ImageBuffer& templ) {
  if (query.empty() || templ.empty()) {
    throw DimensionError("query and template must be non-empty");
  }
  if (templ.width() > query.width() || templ.height() > query.height()) {
    throw DimensionError("template " + std::to_string(templ.width()) + "x" +
                         std::to_string(templ.height()) + " is larger than query " +
                         std::to_string(query.width()) + "x" +
                         std::to_string(query.height()));
  }
}

double channel(const LinearRgb& p, int c) { return c == 0 ? p.r : (c == 1 ? p.g : p.b); }

std::array<double, 3> template_norms(const ImageBuffer& templ) {
  std::array<double, 3> energy{};
  for (const auto& p : templ.pixels()) {
    energy[0] += p.r * p.r;
    energy[1] += p.g * p.g;
    energy[2] += p.b * p.b;
  }
  return {std::sqrt(energy[0]), std::sqrt(energy[1]), std::sqrt(energy[2])};
}

double score_with_norms(const ImageBuffer& query, const ImageBuffer& templ,
                        const std::array<double, 3>& tnorm, int x, int y) {
  std::array<double, 3> cross{};
  std::array<double, 3> energy{};
  for (int j = 0; j < templ.height(); ++j) {
    for (int i = 0; i < templ.width(); ++i) {
      const LinearRgb& t = templ.at(i, j);
      const LinearRgb& q = query.at(x + i, y + j);
      cross[0] += t.r * q.r;
      cross[1] += t.g * q.g;
      cross[2] += t.b * q.b;
      energy[0] += q.r * q.r;
      energy[1] += q.g * q.g;
      energy[2] += q.b * q.b;
    }
  }
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double denom = tnorm[c] * std::sqrt(energy[c]);
    if (denom > 0.0) total += cross[c] / denom;
  }
  return total;
}

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
int smooth_size(int n) {
  for (int candidate = n;; ++candidate) {
    int v = candidate;
    for (int p : {2, 3, 5, 7}) {
      while (v % p == 0) v /= p;
    }
    if (v == 1) return candidate;
  }
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwArray = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwArray<T> fftw_array(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwArray<T>(p);
}

// Valid-placement cross-correlation sum_ij t(i,j) q(x+i, y+j) for one channel,
// computed as a circular correlation on a padded grid. Placements with
// x <= W - w never wrap, so padding beyond W x H is only for FFT speed.
class ChannelCorrelator {
 public:
  ChannelCorrelator(int width, int height)
      : nx_(smooth_size(width)),
        ny_(smooth_size(height)),
        spectral_cols_(nx_ / 2 + 1),
        real_(fftw_array<double>(static_cast<std::size_t>(nx_) * ny_)),
        query_spec_(fftw_array<fftw_complex>(static_cast<std::size_t>(spectral_cols_) * ny_)),
        templ_spec_(fftw_array<fftw_complex>(static_cast<std::size_t>(spectral_cols_) * ny_)) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_2d(ny_, nx_, real_.get(), query_spec_.get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(ny_, nx_, query_spec_.get(), real_.get(), FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw Error("FFT planning failed");
    }
  }

  ChannelCorrelator(const ChannelCorrelator&) = delete;
  ChannelCorrelator& operator=(const ChannelCorrelator&) = delete;

  ~ChannelCorrelator() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  // Writes the correlation for all valid placements into `out`
  // (row-major, out_w x out_h).
  void correlate(const ImageBuffer& query, const ImageBuffer& templ, int c,
                 std::vector<double>& out, int out_w, int out_h) {
    const std::size_t total = static_cast<std::size_t>(nx_) * ny_;
    std::fill(real_.get(), real_.get() + total, 0.0);
    for (int y = 0; y < query.height(); ++y) {
      for (int x = 0; x < query.width(); ++x) {
        real_[static_cast<std::size_t>(y) * nx_ + x] = channel(query.at(x, y), c);
      }
    }
    fftw_execute_dft_r2c(forward_, real_.get(), query_spec_.get());

    std::fill(real_.get(), real_.get() + total, 0.0);
    for (int y = 0; y < templ.height(); ++y) {
      for (int x = 0; x < templ.width(); ++x) {
        real_[static_cast<std::size_t>(y) * nx_ + x] = channel(templ.at(x, y), c);
      }
    }
    fftw_execute_dft_r2c(forward_, real_.get(), templ_spec_.get());

    // Correlation theorem: Q * conj(T).
    const std::size_t spectral = static_cast<std::size_t>(spectral_cols_) * ny_;
    for (std::size_t k = 0; k < spectral; ++k) {
      const double qr = query_spec_[k][0];
      const double qi = query_spec_[k][1];
      const double tr = templ_spec_[k][0];
      const double ti = templ_spec_[k][1];
      query_spec_[k][0] = qr * tr + qi * ti;
      query_spec_[k][1] = qi * tr - qr * ti;
    }
    fftw_execute_dft_c2r(backward_, query_spec_.get(), real_.get());

    const double scale = 1.0 / static_cast<double>(total);
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        out[static_cast<std::size_t>(y) * out_w + x] =
            real_[static_cast<std::size_t>(y) * nx_ + x] * scale;
      }
    }
  }

 private:
  int nx_;
  int ny_;
  int spectral_cols_;
  FftwArray<double> real_;
  FftwArray<fftw_complex> query_spec_;
  FftwArray<fftw_complex> templ_spec_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// Summed-area table of squared channel values with a zero guard row/column.
class SquaredIntegral {
 public:
  SquaredIntegral(const ImageBuffer& image, int c)
      : stride_(image.width() + 1),
        table_(static_cast<std::size_t>(stride_) * (image.height() + 1), 0.0) {
    for (int y = 0; y < image.height(); ++y) {
      double row = 0.0;
      for (int x = 0; x < image.width(); ++x) {
        const double v = channel(image.at(x, y), c);
        row += v * v;
        table_[idx(x + 1, y + 1)] = table_[idx(x + 1, y)] + row;
      }
    }
    total_ = table_.back();
  }

  double window(int x, int y, int w, int h) const {
    return table_[idx(x + w, y + h)] - table_[idx(x, y + h)] - table_[idx(x + w, y)] +
           table_[idx(x, y)];
  }

  double total() const { return total_; }

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * stride_ + static_cast<std::size_t>(x);
  }

  int stride_;
  std::vector<double> table_;
  double total_ = 0.0;
};

// Absolute bound on the deviation between the FFT score and the direct score
// for windows with non-negligible energy.
constexpr double kRescoreTolerance = 1e-7;

}  // namespace

double ncc_score(const ImageBuffer& query, const ImageBuffer& templ, int x, int y) {
  check_dimensions(query, templ);
  if (x < 0 || y < 0 || x > query.width() - templ.width() ||
      y > query.height() - templ.height()) {
    throw DimensionError("placement (" + std::to_string(x) + "," + std::to_string(y) +
                         ") is outside the valid range");
  }
  return score_with_norms(query, templ, template_norms(templ), x, y);
}

MatchOutcome match_template(const ImageBuffer& query, const ImageBuffer& templ, bool keep_map) {
  check_dimensions(query, templ);
  const int out_w = query.width() - templ.width() + 1;
  const int out_h = query.height() - templ.height() + 1;
  const auto tnorm = template_norms(templ);

  ScoreMap map{out_w, out_h, std::vector<double>(static_cast<std::size_t>(out_w) * out_h)};
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      map.scores[static_cast<std::size_t>(y) * out_w + x] =
          score_with_norms(query, templ, tnorm, x, y);
    }
  }
  // The tie-break is applied after the full map exists.
  const auto best = std::max_element(map.scores.begin(), map.scores.end());
  const auto pos = static_cast<int>(best - map.scores.begin());

  MatchOutcome outcome;
  outcome.x = pos % out_w;
  outcome.y = pos / out_w;
  outcome.score = *best;
  if (keep_map) outcome.score_map = std::move(map);
  return outcome;
}

MatchOutcome match_accelerated(const ImageBuffer& query, const ImageBuffer& templ,
                               bool keep_map) {
  check_dimensions(query, templ);
  const int tw = templ.width();
  const int th = templ.height();
  const int out_w = query.width() - tw + 1;
  const int out_h = query.height() - th + 1;
  const std::size_t placements = static_cast<std::size_t>(out_w) * out_h;
  const auto tnorm = template_norms(templ);

  std::vector<double> scores(placements, 0.0);
  std::vector<double> cross(placements);
  ChannelCorrelator correlator(query.width(), query.height());
  for (int c = 0; c < 3; ++c) {
    if (tnorm[c] == 0.0) continue;
    correlator.correlate(query, templ, c, cross, out_w, out_h);
    const SquaredIntegral integral(query, c);
    // Integral-image differences carry absolute error proportional to the
    // full-image energy; anything below that floor is treated as black.
    const double floor = 64.0 * DBL_EPSILON * std::max(1.0, integral.total());
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        const double energy = integral.window(x, y, tw, th);
        if (energy <= floor) continue;
        const double term = cross[static_cast<std::size_t>(y) * out_w + x] /
                            (tnorm[c] * std::sqrt(energy));
        scores[static_cast<std::size_t>(y) * out_w + x] += std::clamp(term, -1.0, 1.0);
      }
    }
  }

  // Visit placements by descending approximate score, re-scoring exactly
  // until no remaining placement can beat the best exact score.
  std::vector<std::size_t> order(placements);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });
  std::size_t best_pos = order.front();
  double best_exact = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t pos = order[k];
    if (scores[pos] + kRescoreTolerance < best_exact) break;
    const int x = static_cast<int>(pos % out_w);
    const int y = static_cast<int>(pos / out_w);
    const double exact = score_with_norms(query, templ, tnorm, x, y);
    scores[pos] = exact;
    if (exact > best_exact || (exact == best_exact && pos < best_pos)) {
      best_exact = exact;
      best_pos = pos;
    }
  }

  MatchOutcome outcome;
  outcome.x = static_cast<int>(best_pos % out_w);
  outcome.y = static_cast<int>(best_pos / out_w);
  outcome.score = best_exact;
  if (keep_map) outcome.score_map = ScoreMap{out_w, out_h, std::move(scores)};
  return outcome;
}

}  // namespace nwb
