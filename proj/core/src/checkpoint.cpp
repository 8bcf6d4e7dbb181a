#include "lugasr/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace lugasr {

namespace {

constexpr char kMagic[4] = {'L', 'G', 'C', 'K'};

class Writer {
 public:
  void u32(uint32_t v) { raw(&v, 4); }
  void i32(int32_t v) { raw(&v, 4); }
  void i64(int64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void matrix(const Eigen::MatrixXd& m) {
    u32(static_cast<uint32_t>(m.rows()));
    u32(static_cast<uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }
  void vector(const Eigen::VectorXd& v) {
    u32(static_cast<uint32_t>(v.size()));
    u32(1);
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  void raw(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  std::vector<uint8_t> buf_;
};

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint32_t u32() { return get<uint32_t>(); }
  int32_t i32() { return get<int32_t>(); }
  int64_t i64() { return get<int64_t>(); }
  double f64() { return get<double>(); }
  std::string str() {
    uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  Eigen::MatrixXd matrix() {
    uint32_t rows = u32(), cols = u32();
    need(static_cast<size_t>(rows) * cols * 8);
    Eigen::MatrixXd m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
      for (uint32_t c = 0; c < cols; ++c) m(r, c) = f64();
    return m;
  }
  Eigen::VectorXd vector() {
    Eigen::MatrixXd m = matrix();
    if (m.cols() != 1) throw CorruptCheckpoint("expected a column vector");
    return m.col(0);
  }

 private:
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(size_t n) {
    if (pos_ + n > size_) throw CorruptCheckpoint("truncated checkpoint");
  }
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

template <typename Model>
void write_tensors(Writer& w, const Model& m) {
  visit_tensors(m, [&](const char*, const auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Eigen::VectorXd>) {
      w.vector(t);
    } else {
      w.matrix(t);
    }
  });
}

template <typename Model>
void read_tensors(Reader& r, Model& m) {
  visit_tensors(m, [&](const char*, auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Eigen::VectorXd>) {
      t = r.vector();
    } else {
      t = r.matrix();
    }
  });
}

}  // namespace

std::vector<uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.u32(kCheckpointVersion);
  w.str(ckpt.model.alphabet.to_utf8());
  w.i32(ckpt.epoch);
  w.i32(ckpt.feature_config.window_ms);
  w.i32(ckpt.feature_config.hop_ms);
  w.i32(ckpt.feature_config.n_mels);
  w.i32(ckpt.feature_config.n_mfcc);
  w.i32(ckpt.feature_config.context);
  w.u32(ckpt.feature_stats ? 1 : 0);
  if (ckpt.feature_stats) {
    w.vector(ckpt.feature_stats->mean);
    w.vector(ckpt.feature_stats->var);
  }
  write_tensors(w, ckpt.model);
  w.i64(ckpt.adam.step);
  write_tensors(w, ckpt.adam.m);
  write_tensors(w, ckpt.adam.v);

  std::vector<uint8_t> payload = w.take();
  std::vector<uint8_t> out;
  out.reserve(payload.size() + 8);
  out.insert(out.end(), kMagic, kMagic + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  uint32_t crc = static_cast<uint32_t>(
      crc32(0L, payload.data(), static_cast<uInt>(payload.size())));
  out.push_back(crc & 0xFF);
  out.push_back((crc >> 8) & 0xFF);
  out.push_back((crc >> 16) & 0xFF);
  out.push_back((crc >> 24) & 0xFF);
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CorruptCheckpoint("not a checkpoint file");
  const uint8_t* payload = bytes.data() + 4;
  const size_t payload_size = bytes.size() - 8;
  uint32_t stored_crc = bytes[bytes.size() - 4] |
                        (bytes[bytes.size() - 3] << 8) |
                        (bytes[bytes.size() - 2] << 16) |
                        (uint32_t(bytes[bytes.size() - 1]) << 24);
  uint32_t crc = static_cast<uint32_t>(
      crc32(0L, payload, static_cast<uInt>(payload_size)));
  if (crc != stored_crc)
    throw CorruptCheckpoint("checksum mismatch (file truncated or damaged)");

  Reader r(payload, payload_size);
  uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw VersionMismatch(version, kCheckpointVersion);

  Checkpoint ckpt;
  ckpt.model.alphabet = Alphabet(r.str());
  ckpt.epoch = r.i32();
  ckpt.feature_config.window_ms = r.i32();
  ckpt.feature_config.hop_ms = r.i32();
  ckpt.feature_config.n_mels = r.i32();
  ckpt.feature_config.n_mfcc = r.i32();
  ckpt.feature_config.context = r.i32();
  if (r.u32() == 1) {
    FeatureStats stats;
    stats.mean = r.vector();
    stats.var = r.vector();
    ckpt.feature_stats = std::move(stats);
  }
  read_tensors(r, ckpt.model);
  ckpt.adam.step = r.i64();
  read_tensors(r, ckpt.adam.m);
  read_tensors(r, ckpt.adam.v);
  ckpt.model.check_consistent();
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace lugasr
