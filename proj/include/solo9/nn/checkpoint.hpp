#pragma once

#include <fstream>
#include <string>

#include "solo9/nn/adam.hpp"
#include "solo9/nn/normalizer.hpp"

namespace solo9 {

/// Versioned binary container of named, typed records. Readers consume the
/// records in the order they were written; a name or type mismatch is an
/// error, which keeps checkpoints self-describing enough to fail loudly.
class CheckpointWriter {
 public:
  explicit CheckpointWriter(const std::string& path);
  void put_i64(const std::string& name, int64_t v);
  void put_f64(const std::string& name, double v);
  void put_string(const std::string& name, const std::string& v);
  void put_vec(const std::string& name, const VecX& v);
  void put_mat(const std::string& name, const MatX& m);
  void put_mlp(const std::string& name, const Mlp& net);
  void put_adam(const std::string& name, const AdamState& s);
  void put_adam_vec(const std::string& name, const AdamVecState& s);
  void put_normalizer(const std::string& name, const RunningNormalizer& n);

 private:
  void header(uint8_t type, const std::string& name);
  std::ofstream out_;
  std::string path_;
};

class CheckpointReader {
 public:
  explicit CheckpointReader(const std::string& path);
  int64_t get_i64(const std::string& name);
  double get_f64(const std::string& name);
  std::string get_string(const std::string& name);
  VecX get_vec(const std::string& name);
  MatX get_mat(const std::string& name);
  Mlp get_mlp(const std::string& name);
  AdamState get_adam(const std::string& name);
  AdamVecState get_adam_vec(const std::string& name);
  RunningNormalizer get_normalizer(const std::string& name);

 private:
  void expect(uint8_t type, const std::string& name);
  std::ifstream in_;
  std::string path_;
};

}  // namespace solo9
