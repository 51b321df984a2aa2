#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbtd {

// Raised for malformed input files and index violations; the CLI maps it to
// exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using IndexTuple = std::vector<std::int32_t>;  // 0-based internally

// Sparse (p+1)-mode tensor of positive counts. Zero entries are never stored.
// Immutable after construction; safe to share across threads.
class CountTensor {
 public:
  CountTensor(int p, std::vector<std::int32_t> dims);

  int p() const { return p_; }
  const std::vector<std::int32_t>& dims() const { return dims_; }
  std::int32_t num_samples() const { return dims_[0]; }

  // Adds `count` at the 0-based index tuple (c_0 .. c_p); duplicates sum.
  void add(const IndexTuple& idx, std::int64_t count);

  const std::map<IndexTuple, std::int64_t>& entries() const { return entries_; }
  std::int64_t lambda(std::int32_t sample) const { return lambda_[sample]; }
  const std::vector<std::int64_t>& lambda() const { return lambda_; }
  std::int64_t total() const;

 private:
  int p_;
  std::vector<std::int32_t> dims_;
  std::map<IndexTuple, std::int64_t> entries_;
  std::vector<std::int64_t> lambda_;
};

// pi = b / lambda_x per sample; samples with lambda_x = 0 carry no entries
// and are listed in zero_samples.
struct ConditionalProbTensor {
  int p = 0;
  std::vector<std::int32_t> dims;
  std::map<IndexTuple, double> entries;
  std::vector<std::int32_t> zero_samples;
};

ConditionalProbTensor normalize(const CountTensor& t);

// Bijection between topic tuples and flat indices, the p-mode generalization
// of column-major order. Internal indices are 0-based.
class TopicIndexMap {
 public:
  explicit TopicIndexMap(std::vector<std::int32_t> k_dims);
  TopicIndexMap() = default;

  const std::vector<std::int32_t>& k_dims() const { return k_dims_; }
  std::int64_t total() const { return total_; }

  std::int64_t flat(std::span<const std::int32_t> tuple) const;
  IndexTuple tuple(std::int64_t flat) const;

  // 1-based variants matching the external convention
  // vec(k) = k_1 + (k_2-1) K_1 + ...
  std::int64_t vec1(std::span<const std::int32_t> tuple1) const;
  IndexTuple tuple1(std::int64_t vec) const;

 private:
  std::vector<std::int32_t> k_dims_;
  std::int64_t total_ = 0;
};

// TSV loader. Line 1 must be `#dims d_0 d_1 ... d_p`; records are
// `sample \t y_1 \t ... \t y_p \t count` with 1-based indices. `#` starts a
// comment. Duplicate tuples sum.
CountTensor load_counts(const std::string& path, int p);

void save_counts(const CountTensor& t, const std::string& path);

}  // namespace hbtd
