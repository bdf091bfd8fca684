#include "solo9/nn/checkpoint.hpp"

#include <cstring>

namespace solo9 {
namespace {

constexpr char kMagic[4] = {'S', '9', 'C', 'K'};
constexpr uint32_t kVersion = 1;

enum RecordType : uint8_t {
  kI64 = 1,
  kF64 = 2,
  kString = 3,
  kVec = 4,
  kMat = 5,
  kMlp = 6,
  kAdam = 7,
  kAdamVec = 8,
  kNormalizer = 9,
};

template <typename T>
void put_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void put_str(std::ostream& out, const std::string& s) {
  put_raw<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
  uint32_t n = get_raw<uint32_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

void put_mat_raw(std::ostream& out, const MatX& m) {
  put_raw<uint32_t>(out, static_cast<uint32_t>(m.rows()));
  put_raw<uint32_t>(out, static_cast<uint32_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

MatX get_mat_raw(std::istream& in) {
  uint32_t r = get_raw<uint32_t>(in), c = get_raw<uint32_t>(in);
  MatX m(r, c);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  return m;
}

void put_vec_raw(std::ostream& out, const VecX& v) {
  put_raw<uint32_t>(out, static_cast<uint32_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * v.size()));
}

VecX get_vec_raw(std::istream& in) {
  uint32_t n = get_raw<uint32_t>(in);
  VecX v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * v.size()));
  return v;
}

}  // namespace

CheckpointWriter::CheckpointWriter(const std::string& path)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw ValidationError("cannot open checkpoint '" + path + "' for writing");
  out_.write(kMagic, 4);
  put_raw<uint32_t>(out_, kVersion);
  put_str(out_, "float64");
}

void CheckpointWriter::header(uint8_t type, const std::string& name) {
  put_raw<uint8_t>(out_, type);
  put_str(out_, name);
}

void CheckpointWriter::put_i64(const std::string& name, int64_t v) {
  header(kI64, name);
  put_raw<int64_t>(out_, v);
}
void CheckpointWriter::put_f64(const std::string& name, double v) {
  header(kF64, name);
  put_raw<double>(out_, v);
}
void CheckpointWriter::put_string(const std::string& name, const std::string& v) {
  header(kString, name);
  put_str(out_, v);
}
void CheckpointWriter::put_vec(const std::string& name, const VecX& v) {
  header(kVec, name);
  put_vec_raw(out_, v);
}
void CheckpointWriter::put_mat(const std::string& name, const MatX& m) {
  header(kMat, name);
  put_mat_raw(out_, m);
}
void CheckpointWriter::put_mlp(const std::string& name, const Mlp& net) {
  header(kMlp, name);
  put_raw<uint32_t>(out_, static_cast<uint32_t>(net.layers.size()));
  for (const auto& l : net.layers) {
    put_raw<uint8_t>(out_, static_cast<uint8_t>(l.act));
    put_mat_raw(out_, l.W);
    put_vec_raw(out_, l.b);
  }
}
void CheckpointWriter::put_adam(const std::string& name, const AdamState& s) {
  header(kAdam, name);
  put_raw<int64_t>(out_, s.step);
  put_raw<uint32_t>(out_, static_cast<uint32_t>(s.mW.size()));
  for (size_t l = 0; l < s.mW.size(); ++l) {
    put_mat_raw(out_, s.mW[l]);
    put_mat_raw(out_, s.vW[l]);
    put_vec_raw(out_, s.mb[l]);
    put_vec_raw(out_, s.vb[l]);
  }
}
void CheckpointWriter::put_adam_vec(const std::string& name, const AdamVecState& s) {
  header(kAdamVec, name);
  put_raw<int64_t>(out_, s.step);
  put_vec_raw(out_, s.m);
  put_vec_raw(out_, s.v);
}
void CheckpointWriter::put_normalizer(const std::string& name, const RunningNormalizer& n) {
  header(kNormalizer, name);
  put_raw<double>(out_, n.count);
  put_raw<double>(out_, n.var_floor);
  put_vec_raw(out_, n.mean);
  put_vec_raw(out_, n.m2);
}

CheckpointReader::CheckpointReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw ValidationError("cannot open checkpoint '" + path + "'");
  char magic[4];
  in_.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw ValidationError("'" + path + "' is not a checkpoint (bad magic)");
  uint32_t version = get_raw<uint32_t>(in_);
  if (version != kVersion)
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  get_str(in_);  // dtype tag
}

void CheckpointReader::expect(uint8_t type, const std::string& name) {
  uint8_t t = get_raw<uint8_t>(in_);
  std::string n = get_str(in_);
  if (!in_) throw ValidationError(path_ + ": truncated checkpoint, wanted '" + name + "'");
  if (t != type || n != name)
    throw ValidationError(path_ + ": expected record '" + name + "', found '" + n + "'");
}

int64_t CheckpointReader::get_i64(const std::string& name) {
  expect(kI64, name);
  return get_raw<int64_t>(in_);
}
double CheckpointReader::get_f64(const std::string& name) {
  expect(kF64, name);
  return get_raw<double>(in_);
}
std::string CheckpointReader::get_string(const std::string& name) {
  expect(kString, name);
  return get_str(in_);
}
VecX CheckpointReader::get_vec(const std::string& name) {
  expect(kVec, name);
  return get_vec_raw(in_);
}
MatX CheckpointReader::get_mat(const std::string& name) {
  expect(kMat, name);
  return get_mat_raw(in_);
}
Mlp CheckpointReader::get_mlp(const std::string& name) {
  expect(kMlp, name);
  uint32_t n_layers = get_raw<uint32_t>(in_);
  Mlp net;
  for (uint32_t l = 0; l < n_layers; ++l) {
    Mlp::Layer layer;
    layer.act = static_cast<Activation>(get_raw<uint8_t>(in_));
    layer.W = get_mat_raw(in_);
    layer.b = get_vec_raw(in_);
    net.layers.push_back(std::move(layer));
  }
  return net;
}
AdamState CheckpointReader::get_adam(const std::string& name) {
  expect(kAdam, name);
  AdamState s;
  s.step = get_raw<int64_t>(in_);
  uint32_t n = get_raw<uint32_t>(in_);
  for (uint32_t l = 0; l < n; ++l) {
    s.mW.push_back(get_mat_raw(in_));
    s.vW.push_back(get_mat_raw(in_));
    s.mb.push_back(get_vec_raw(in_));
    s.vb.push_back(get_vec_raw(in_));
  }
  return s;
}
AdamVecState CheckpointReader::get_adam_vec(const std::string& name) {
  expect(kAdamVec, name);
  AdamVecState s;
  s.step = get_raw<int64_t>(in_);
  s.m = get_vec_raw(in_);
  s.v = get_vec_raw(in_);
  return s;
}
RunningNormalizer CheckpointReader::get_normalizer(const std::string& name) {
  expect(kNormalizer, name);
  RunningNormalizer n;
  n.count = get_raw<double>(in_);
  n.var_floor = get_raw<double>(in_);
  n.mean = get_vec_raw(in_);
  n.m2 = get_vec_raw(in_);
  return n;
}

}  // namespace solo9
