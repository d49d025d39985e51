#ifndef ACQ_NUMERIC_HPP
#define ACQ_NUMERIC_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace acq {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// log2(sum_i w_i * 2^{x_i}) with a max shift so large exponents do not
/// overflow. Weights may be empty (all ones). Zero weights are skipped.
double log2_sum_exp2(std::span<const double> exponents,
                     std::span<const double> weights = {});

/// Calls fn(begin, end) over contiguous chunks of [0, n). With threads <= 1
/// everything runs on the calling thread. Chunk boundaries depend only on n
/// and the thread count, so per-index results are deterministic.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace acq

#endif  // ACQ_NUMERIC_HPP
