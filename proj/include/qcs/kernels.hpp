#pragma once

// Deterministic chunked reductions. Work is split into fixed-size chunks,
// each chunk is reduced independently, and chunk partials are merged in
// chunk order. The OpenMP path and the serial reference therefore produce
// bit-identical results for the same chunking.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace qcs {

enum class Execution { parallel, serial };

/// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  void merge(const CompensatedSum& o) {
    add(o.sum);
    add(o.comp);
  }
  double value() const { return sum + comp; }
};

/// Compensated first and second moments of a K-vector valued sample stream.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(int k) : k_(k), first_(k), second_(k * (k + 1) / 2) {}

  void add(const Eigen::Ref<const Eigen::VectorXd>& x) {
    for (int a = 0, idx = 0; a < k_; ++a) {
      first_[a].add(x[a]);
      for (int b = a; b < k_; ++b) second_[idx++].add(x[a] * x[b]);
    }
    ++count_;
  }
  void merge(const MomentAccumulator& o) {
    for (int a = 0; a < k_; ++a) first_[a].merge(o.first_[a]);
    for (std::size_t s = 0; s < second_.size(); ++s) second_[s].merge(o.second_[s]);
    count_ += o.count_;
  }

  int dim() const { return k_; }
  std::uint64_t count() const { return count_; }
  Eigen::VectorXd mean() const;
  /// Covariance of the sample mean (sample covariance / count).
  Eigen::MatrixXd mean_covariance() const;

 private:
  int k_ = 0;
  std::vector<CompensatedSum> first_;
  std::vector<CompensatedSum> second_;
  std::uint64_t count_ = 0;
};

/// Number of chunks covering `count` items.
inline std::uint64_t chunk_count(std::uint64_t count, std::uint64_t chunk_size) {
  return (count + chunk_size - 1) / chunk_size;
}

/// Runs `reduce_chunk(chunk_index, begin, end) -> Partial` for every chunk and
/// merges partials in chunk order with `Partial::merge`.
template <class Partial, class ChunkFn>
Partial chunked_reduce(std::uint64_t count, std::uint64_t chunk_size, Partial init,
                       ChunkFn&& reduce_chunk, Execution exec = Execution::parallel) {
  const std::uint64_t chunks = chunk_count(count, chunk_size);
  std::vector<Partial> partials(chunks, init);
  const auto run = [&](std::int64_t c) {
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk_size;
    const std::uint64_t end = std::min(count, begin + chunk_size);
    partials[c] = reduce_chunk(static_cast<std::uint64_t>(c), begin, end);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) run(c);
  } else {
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) run(c);
  }
  Partial total = init;
  for (const Partial& p : partials) total.merge(p);
  return total;
}

/// Caps OpenMP fan-out; 0 leaves the runtime default.
void set_thread_limit(int threads);

}  // namespace qcs
