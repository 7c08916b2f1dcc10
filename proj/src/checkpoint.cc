#include "gfse/checkpoint.h"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "gfse/config.h"
#include "gfse/graph_io.h"

namespace gfse {
namespace {

constexpr char kMagic[4] = {'G', 'F', 'S', 'E'};
constexpr std::uint8_t kF32 = 0;
constexpr std::uint8_t kF64 = 1;
const std::string kUncertainty = "unc.s";

template <class T>
constexpr std::uint8_t dtype_code() {
  return sizeof(T) == 4 ? kF32 : kF64;
}

class Writer {
 public:
  template <class U>
  void uint(U v) {
    for (std::size_t b = 0; b < sizeof(U); ++b) out_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  }
  void bytes(std::string_view s) { out_.append(s); }
  void value(float x) { uint(std::bit_cast<std::uint32_t>(x)); }
  void value(double x) { uint(std::bit_cast<std::uint64_t>(x)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <class U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b)
      v |= static_cast<U>(static_cast<unsigned char>(in_[pos_ + b])) << (8 * b);
    pos_ += sizeof(U);
    return v;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  template <class T>
  T value() {
    if constexpr (sizeof(T) == 4) return std::bit_cast<float>(uint<std::uint32_t>());
    else return std::bit_cast<double>(uint<std::uint64_t>());
  }
  bool done() const { return pos_ == in_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) {
    if (in_.size() - pos_ < n)
      throw CheckpointError("truncated checkpoint at byte " + std::to_string(pos_));
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

nlohmann::json read_header(Reader& r) {
  if (r.bytes(4) != std::string_view(kMagic, 4)) throw CheckpointError("bad magic (not a GFSE checkpoint)");
  auto version = r.uint<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  auto len = r.uint<std::uint32_t>();
  try {
    return nlohmann::json::parse(r.bytes(len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("config blob: ") + e.what());
  }
}

template <class T>
void write_values(Writer& w, const std::vector<T>& v) {
  for (T x : v) w.value(x);
}

}  // namespace

template <class T>
std::string serialize_checkpoint(const Checkpoint<T>& ckpt) {
  Writer w;
  w.bytes(std::string_view(kMagic, 4));
  w.uint(kCheckpointVersion);
  std::string cfg = to_json(ckpt.config).dump();
  w.uint(static_cast<std::uint32_t>(cfg.size()));
  w.bytes(cfg);

  std::uint32_t count = 0;
  for (const auto& p : ckpt.params) count += p.name != kUncertainty;
  w.uint(count);
  for (const auto& p : ckpt.params) {
    if (p.name == kUncertainty) continue;
    w.uint(static_cast<std::uint16_t>(p.name.size()));
    w.bytes(p.name);
    w.uint(dtype_code<T>());
    w.uint(static_cast<std::uint8_t>(p.shape.size()));
    for (auto d : p.shape) w.uint(static_cast<std::uint32_t>(d));
    write_values(w, p.value);
  }
  const auto& unc = ckpt.params.at(kUncertainty).value;
  w.uint(dtype_code<T>());
  w.uint(static_cast<std::uint32_t>(unc.size()));
  write_values(w, unc);
  w.uint(ckpt.step);
  w.uint(ckpt.epoch);
  w.uint(static_cast<std::uint8_t>(ckpt.resume.has_value()));
  if (ckpt.resume) {
    const auto& rs = *ckpt.resume;
    w.uint(static_cast<std::uint32_t>(rs.train_json.size()));
    w.bytes(rs.train_json);
    w.uint(rs.adam_step);
    w.uint(static_cast<std::uint32_t>(rs.m.size()));
    for (std::size_t i = 0; i < rs.m.size(); ++i) {
      w.uint(static_cast<std::uint32_t>(rs.m[i].size()));
      write_values(w, rs.m[i]);
      write_values(w, rs.v[i]);
    }
  }
  return w.take();
}

std::string checkpoint_dtype(std::string_view bytes) {
  Reader r(bytes);
  auto cfg = read_header(r);
  return cfg.value("dtype", std::string("f32"));
}

template <class T>
Checkpoint<T> parse_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  Checkpoint<T> ck;
  try {
    ck.config = model_config_from_json(read_header(r));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("config blob: ") + e.what());
  }
  auto count = r.uint<std::uint32_t>();
  for (std::uint32_t t = 0; t < count; ++t) {
    auto len = r.uint<std::uint16_t>();
    std::string name(r.bytes(len));
    if (r.uint<std::uint8_t>() != dtype_code<T>())
      throw CheckpointError("tensor " + name + " has a different dtype than requested");
    auto ndim = r.uint<std::uint8_t>();
    ad::Shape shape;
    for (std::uint8_t k = 0; k < ndim; ++k) shape.push_back(r.uint<std::uint32_t>());
    std::vector<T> v(ad::numel(shape));
    for (auto& x : v) x = r.template value<T>();
    ck.params.add(std::move(name), std::move(shape), std::move(v));
  }
  if (r.uint<std::uint8_t>() != dtype_code<T>()) throw CheckpointError("uncertainty dtype mismatch");
  std::vector<T> unc(r.uint<std::uint32_t>());
  for (auto& x : unc) x = r.template value<T>();
  ad::Shape unc_shape{1, unc.size()};
  ck.params.add(kUncertainty, std::move(unc_shape), std::move(unc));
  ck.step = r.uint<std::uint64_t>();
  ck.epoch = r.uint<std::uint64_t>();
  if (r.uint<std::uint8_t>()) {
    ResumeState rs;
    rs.train_json = std::string(r.bytes(r.uint<std::uint32_t>()));
    rs.adam_step = r.uint<std::uint64_t>();
    auto np = r.uint<std::uint32_t>();
    if (np != ck.params.size()) throw CheckpointError("optimizer state does not match parameter count");
    for (std::uint32_t i = 0; i < np; ++i) {
      auto len = r.uint<std::uint32_t>();
      std::vector<double> m(len), v(len);
      for (auto& x : m) x = r.value<double>();
      for (auto& x : v) x = r.value<double>();
      rs.m.push_back(std::move(m));
      rs.v.push_back(std::move(v));
    }
    ck.resume = std::move(rs);
  }
  if (!r.done()) throw CheckpointError("trailing bytes after checkpoint at byte " + std::to_string(r.pos()));
  try {
    GfseModel<T> check(ck.config, ck.params);
  } catch (const ConfigError& e) {
    throw CheckpointError(e.what());
  }
  return ck;
}

template <class T>
void save_checkpoint(const std::filesystem::path& path, const Checkpoint<T>& ckpt) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

template <class T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint<T>(read_text_file(path));
}

template std::string serialize_checkpoint(const Checkpoint<float>&);
template std::string serialize_checkpoint(const Checkpoint<double>&);
template Checkpoint<float> parse_checkpoint(std::string_view);
template Checkpoint<double> parse_checkpoint(std::string_view);
template void save_checkpoint(const std::filesystem::path&, const Checkpoint<float>&);
template void save_checkpoint(const std::filesystem::path&, const Checkpoint<double>&);
template Checkpoint<float> load_checkpoint(const std::filesystem::path&);
template Checkpoint<double> load_checkpoint(const std::filesystem::path&);

}  // namespace gfse
