#include "hbtd/count_tensor.hpp"

#include <fstream>
#include <sstream>

namespace hbtd {

CountTensor::CountTensor(int p, std::vector<std::int32_t> dims)
    : p_(p), dims_(std::move(dims)) {
  if (p_ < 1) throw DataError("mode count p must be >= 1");
  if (static_cast<int>(dims_.size()) != p_ + 1)
    throw DataError("dims must have p+1 entries");
  for (auto d : dims_)
    if (d <= 0) throw DataError("all dims must be positive");
  lambda_.assign(dims_[0], 0);
}

void CountTensor::add(const IndexTuple& idx, std::int64_t count) {
  if (static_cast<int>(idx.size()) != p_ + 1)
    throw DataError("index tuple arity mismatch");
  for (int j = 0; j <= p_; ++j)
    if (idx[j] < 0 || idx[j] >= dims_[j])
      throw DataError("index out of declared bounds in mode " + std::to_string(j));
  if (count <= 0) throw DataError("counts must be strictly positive");
  entries_[idx] += count;
  lambda_[idx[0]] += count;
}

std::int64_t CountTensor::total() const {
  std::int64_t t = 0;
  for (auto l : lambda_) t += l;
  return t;
}

ConditionalProbTensor normalize(const CountTensor& t) {
  ConditionalProbTensor out;
  out.p = t.p();
  out.dims = t.dims();
  for (const auto& [idx, b] : t.entries()) {
    out.entries[idx] =
        static_cast<double>(b) / static_cast<double>(t.lambda(idx[0]));
  }
  for (std::int32_t x = 0; x < t.num_samples(); ++x)
    if (t.lambda(x) == 0) out.zero_samples.push_back(x);
  return out;
}

TopicIndexMap::TopicIndexMap(std::vector<std::int32_t> k_dims)
    : k_dims_(std::move(k_dims)) {
  total_ = 1;
  for (auto k : k_dims_) {
    if (k <= 0) throw DataError("topic counts must be positive");
    total_ *= k;
  }
}

std::int64_t TopicIndexMap::flat(std::span<const std::int32_t> tuple) const {
  std::int64_t f = 0;
  std::int64_t stride = 1;
  for (std::size_t j = 0; j < k_dims_.size(); ++j) {
    if (tuple[j] < 0 || tuple[j] >= k_dims_[j])
      throw DataError("topic component out of range in mode " + std::to_string(j + 1));
    f += stride * tuple[j];
    stride *= k_dims_[j];
  }
  return f;
}

IndexTuple TopicIndexMap::tuple(std::int64_t flat) const {
  IndexTuple out(k_dims_.size());
  for (std::size_t j = 0; j < k_dims_.size(); ++j) {
    out[j] = static_cast<std::int32_t>(flat % k_dims_[j]);
    flat /= k_dims_[j];
  }
  return out;
}

std::int64_t TopicIndexMap::vec1(std::span<const std::int32_t> tuple1) const {
  IndexTuple t0(tuple1.size());
  for (std::size_t j = 0; j < tuple1.size(); ++j) t0[j] = tuple1[j] - 1;
  return flat(t0) + 1;
}

IndexTuple TopicIndexMap::tuple1(std::int64_t vec) const {
  IndexTuple t = tuple(vec - 1);
  for (auto& c : t) ++c;
  return t;
}

CountTensor load_counts(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::int32_t> dims;
  bool have_dims = false;
  CountTensor* tensor = nullptr;
  CountTensor storage(1, {1, 1});  // replaced once dims are read

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line);
      std::string tag;
      hs >> tag;
      if (tag == "#dims") {
        if (have_dims)
          throw DataError(path + ":" + std::to_string(lineno) + ": duplicate #dims");
        std::int64_t d;
        while (hs >> d) dims.push_back(static_cast<std::int32_t>(d));
        if (static_cast<int>(dims.size()) != p + 1)
          throw DataError(path + ":" + std::to_string(lineno) +
                          ": #dims must list p+1 = " + std::to_string(p + 1) +
                          " sizes, got " + std::to_string(dims.size()));
        storage = CountTensor(p, dims);
        tensor = &storage;
        have_dims = true;
      }
      continue;
    }
    if (!have_dims)
      throw DataError(path + ": line 1 must be a #dims header");
    std::istringstream ls(line);
    IndexTuple idx(p + 1);
    std::int64_t count = 0;
    for (int j = 0; j <= p; ++j) {
      std::int64_t v;
      if (!(ls >> v))
        throw DataError(path + ":" + std::to_string(lineno) + ": malformed record");
      idx[j] = static_cast<std::int32_t>(v - 1);
    }
    if (!(ls >> count))
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed record");
    std::string trailing;
    if (ls >> trailing)
      throw DataError(path + ":" + std::to_string(lineno) + ": trailing fields");
    if (count <= 0)
      throw DataError(path + ":" + std::to_string(lineno) + ": count must be positive");
    try {
      tensor->add(idx, count);
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_dims) throw DataError(path + ": missing #dims header");
  return storage;
}

void save_counts(const CountTensor& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "#dims";
  for (auto d : t.dims()) out << ' ' << d;
  out << '\n';
  for (const auto& [idx, b] : t.entries()) {
    for (std::size_t j = 0; j < idx.size(); ++j)
      out << (j ? "\t" : "") << idx[j] + 1;
    out << '\t' << b << '\n';
  }
}

}  // namespace hbtd
