#include "solo9/dataset/motion_dataset.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "solo9/core/rng.hpp"

namespace solo9 {

VecX FrameRecord::flatten() const {
  VecX row(channels());
  row << base_pos, base_quat, lin_vel, ang_vel, normal, height, q, qd;
  return row;
}

FrameRecord FrameRecord::unflatten(const Eigen::Ref<const VecX>& row, int dof) {
  if (row.size() != 17 + 2 * dof)
    throw ValidationError("frame row has " + std::to_string(row.size()) +
                          " channels, expected " + std::to_string(17 + 2 * dof));
  FrameRecord f;
  f.base_pos = row.segment<3>(0);
  f.base_quat = row.segment<4>(3);
  f.lin_vel = row.segment<3>(7);
  f.ang_vel = row.segment<3>(10);
  f.normal = row.segment<3>(13);
  f.height = row[16];
  f.q = row.segment(17, dof);
  f.qd = row.segment(17 + dof, dof);
  return f;
}

void FrameRecord::validate() const {
  if (std::abs(base_quat.norm() - 1.0) > 1e-6)
    throw ValidationError("frame quaternion not unit norm");
  if (std::abs(normal.norm() - 1.0) > 1e-6)
    throw ValidationError("frame normal not unit norm");
  Quat quat(base_quat[0], base_quat[1], base_quat[2], base_quat[3]);
  if ((quat * Vec3::UnitZ() - normal).norm() > 1e-6)
    throw ValidationError("frame normal disagrees with the quaternion up-axis");
}

size_t MotionDataset::total_frames() const {
  size_t n = 0;
  for (const auto& c : clips) n += c.frames.size();
  return n;
}

void MotionDataset::validate() const {
  if (meta.dt <= 0) throw ValidationError("dataset dt must be > 0");
  if (meta.dof != 8 && meta.dof != 9)
    throw ValidationError("dataset dof must be 8 or 9");
  for (const auto& c : clips)
    for (const auto& f : c.frames)
      if (f.dof() != meta.dof)
        throw ValidationError("clip '" + c.label + "' frame dof mismatch");
}

std::vector<std::string> frame_channel_names(int dof) {
  std::vector<std::string> names = {"base_pos_x", "base_pos_y", "base_pos_z",
                                    "base_quat_w", "base_quat_x", "base_quat_y", "base_quat_z",
                                    "lin_vel_x", "lin_vel_y", "lin_vel_z",
                                    "ang_vel_x", "ang_vel_y", "ang_vel_z",
                                    "normal_x", "normal_y", "normal_z", "base_height"};
  for (int i = 0; i < dof; ++i) names.push_back("q_" + std::to_string(i));
  for (int i = 0; i < dof; ++i) names.push_back("qd_" + std::to_string(i));
  return names;
}

namespace {

VecX insert_at(const VecX& v, int index, double value) {
  VecX out(v.size() + 1);
  out.head(index) = v.head(index);
  out[index] = value;
  out.tail(v.size() - index) = v.tail(v.size() - index);
  return out;
}

VecX erase_at(const VecX& v, int index) {
  VecX out(v.size() - 1);
  out.head(index) = v.head(index);
  out.tail(out.size() - index) = v.tail(out.size() - index);
  return out;
}

}  // namespace

MotionDataset augment_zero_waist(const MotionDataset& ds, int waist_index) {
  if (ds.meta.dof != 8) throw ValidationError("zero-waist augmentation expects an 8-dof dataset");
  if (waist_index < 0 || waist_index > 8)
    throw ValidationError("waist index must be in [0, 8]");
  MotionDataset out = ds;
  out.meta.dof = 9;
  out.meta.iteration = 0;
  out.meta.provenance = "zero-waist augmentation of: " + ds.meta.provenance;
  out.meta.parent_hash = dataset_hash(ds);
  for (auto& clip : out.clips)
    for (auto& f : clip.frames) {
      f.q = insert_at(f.q, waist_index, 0.0);
      f.qd = insert_at(f.qd, waist_index, 0.0);
    }
  return out;
}

MotionDataset remove_waist(const MotionDataset& ds, int waist_index) {
  if (ds.meta.dof != 9) throw ValidationError("waist removal expects a 9-dof dataset");
  MotionDataset out = ds;
  out.meta.dof = 8;
  for (auto& clip : out.clips)
    for (auto& f : clip.frames) {
      f.q = erase_at(f.q, waist_index);
      f.qd = erase_at(f.qd, waist_index);
    }
  return out;
}

VecX extract_discriminator_obs(const FrameRecord& frame) {
  if (frame.dof() != 9)
    throw ValidationError("discriminator observation needs a 9-dof frame");
  VecX obs(kDiscriminatorObsDim);
  obs << frame.lin_vel, frame.ang_vel.x(), frame.ang_vel.y(), frame.normal, frame.height,
      frame.q, frame.qd;
  return obs;
}

MatX sample_windows(const MotionDataset& ds, int batch, int window, uint64_t seed) {
  if (window < 1) throw ValidationError("window length must be >= 1");
  std::vector<std::pair<int, int>> starts;  // (clip, start)
  for (size_t c = 0; c < ds.clips.size(); ++c) {
    int n = static_cast<int>(ds.clips[c].frames.size());
    if (n < window)
      throw ValidationError("clip '" + ds.clips[c].label + "' has " + std::to_string(n) +
                            " frames, shorter than the window " + std::to_string(window));
    for (int s = 0; s + window <= n; ++s) starts.emplace_back(static_cast<int>(c), s);
  }
  if (starts.empty()) throw ValidationError("dataset has no clips");
  Rng rng(seed);
  MatX out(kDiscriminatorObsDim * window, batch);
  for (int b = 0; b < batch; ++b) {
    auto [c, s] = starts[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(starts.size()) - 1))];
    for (int t = 0; t < window; ++t)
      out.col(b).segment(t * kDiscriminatorObsDim, kDiscriminatorObsDim) =
          extract_discriminator_obs(ds.clips[static_cast<size_t>(c)].frames[static_cast<size_t>(s + t)]);
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'M', 'D', 'S', '1'};
constexpr uint32_t kVersion = 1;

void put_string(std::ostream& out, const std::string& s) {
  uint32_t n = static_cast<uint32_t>(s.size());
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(s.data(), n);
}

std::string get_string(std::istream& in) {
  uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void write_binary(const MotionDataset& ds, std::ostream& out) {
  out.write(kMagic, 4);
  put<uint32_t>(out, kVersion);
  put<uint32_t>(out, static_cast<uint32_t>(ds.meta.dof));
  put<double>(out, ds.meta.dt);
  put<int32_t>(out, ds.meta.iteration);
  put<uint64_t>(out, ds.meta.parent_hash);
  put_string(out, ds.meta.gait);
  put_string(out, ds.meta.provenance);
  auto names = frame_channel_names(ds.meta.dof);
  put<uint32_t>(out, static_cast<uint32_t>(names.size()));
  for (const auto& n : names) put_string(out, n);
  put<uint32_t>(out, static_cast<uint32_t>(ds.clips.size()));
  for (const auto& clip : ds.clips) {
    put_string(out, clip.label);
    put<uint32_t>(out, static_cast<uint32_t>(clip.frames.size()));
    for (const auto& f : clip.frames) {
      VecX row = f.flatten();
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double) * row.size()));
    }
  }
}

MotionDataset read_binary(std::istream& in, const std::string& path) {
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError(path, 0, "not a dataset file (bad magic)");
  uint32_t version = get<uint32_t>(in);
  if (version != kVersion)
    throw ParseError(path, 0, "unsupported dataset version " + std::to_string(version));
  MotionDataset ds;
  ds.meta.dof = static_cast<int>(get<uint32_t>(in));
  ds.meta.dt = get<double>(in);
  ds.meta.iteration = get<int32_t>(in);
  ds.meta.parent_hash = get<uint64_t>(in);
  ds.meta.gait = get_string(in);
  ds.meta.provenance = get_string(in);
  uint32_t n_names = get<uint32_t>(in);
  for (uint32_t i = 0; i < n_names; ++i) get_string(in);
  uint32_t n_clips = get<uint32_t>(in);
  int channels = 17 + 2 * ds.meta.dof;
  for (uint32_t c = 0; c < n_clips; ++c) {
    MotionClip clip;
    clip.label = get_string(in);
    uint32_t n_frames = get<uint32_t>(in);
    clip.frames.reserve(n_frames);
    VecX row(channels);
    for (uint32_t t = 0; t < n_frames; ++t) {
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * channels));
      clip.frames.push_back(FrameRecord::unflatten(row, ds.meta.dof));
    }
    ds.clips.push_back(std::move(clip));
  }
  if (!in) throw ParseError(path, 0, "truncated dataset file");
  return ds;
}

void write_text(const MotionDataset& ds, std::ostream& out) {
  out << "# mds-text " << kVersion << "\n";
  out.precision(17);
  out << "dof = " << ds.meta.dof << "\n";
  out << "dt = " << ds.meta.dt << "\n";
  out << "iteration = " << ds.meta.iteration << "\n";
  out << "parent_hash = " << ds.meta.parent_hash << "\n";
  out << "gait = " << ds.meta.gait << "\n";
  out << "provenance = " << ds.meta.provenance << "\n";
  out << "channels =";
  for (const auto& n : frame_channel_names(ds.meta.dof)) out << " " << n;
  out << "\n";
  for (const auto& clip : ds.clips) {
    out << "clip " << (clip.label.empty() ? "unnamed" : clip.label) << " " << clip.frames.size()
        << "\n";
    for (const auto& f : clip.frames) {
      VecX row = f.flatten();
      for (int i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
      out << "\n";
    }
  }
}

MotionDataset read_text(std::istream& in, const std::string& path) {
  MotionDataset ds;
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line() || line.rfind("# mds-text", 0) != 0)
    throw ParseError(path, lineno, "missing mds-text header");
  // Header fields until the first clip line.
  while (next_line() && line.rfind("clip ", 0) != 0) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, lineno, "expected key = value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    key = trim(key);
    value = trim(value);
    if (key == "dof") ds.meta.dof = std::stoi(value);
    else if (key == "dt") ds.meta.dt = std::stod(value);
    else if (key == "iteration") ds.meta.iteration = std::stoi(value);
    else if (key == "parent_hash") ds.meta.parent_hash = std::stoull(value);
    else if (key == "gait") ds.meta.gait = value;
    else if (key == "provenance") ds.meta.provenance = value;
    // channels line is informational
  }
  int channels = 17 + 2 * ds.meta.dof;
  while (in && line.rfind("clip ", 0) == 0) {
    std::istringstream head(line);
    std::string word, label;
    int n_frames = 0;
    head >> word >> label >> n_frames;
    MotionClip clip;
    clip.label = label;
    clip.frames.reserve(static_cast<size_t>(n_frames));
    VecX row(channels);
    for (int t = 0; t < n_frames; ++t) {
      if (!next_line()) throw ParseError(path, lineno, "truncated clip '" + label + "'");
      std::istringstream fs(line);
      for (int i = 0; i < channels; ++i)
        if (!(fs >> row[i])) throw ParseError(path, lineno, "bad frame row");
      clip.frames.push_back(FrameRecord::unflatten(row, ds.meta.dof));
    }
    ds.clips.push_back(std::move(clip));
    if (!next_line()) break;
  }
  return ds;
}

}  // namespace

void write_dataset(const MotionDataset& ds, const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  if (binary)
    write_binary(ds, out);
  else
    write_text(ds, out);
}

MotionDataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.seekg(0);
  MotionDataset ds = std::memcmp(magic, kMagic, 4) == 0 ? read_binary(in, path)
                                                        : read_text(in, path);
  ds.validate();
  return ds;
}

uint64_t dataset_hash(const MotionDataset& ds) {
  std::ostringstream buf(std::ios::binary);
  write_binary(ds, buf);
  std::string bytes = buf.str();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

MotionDataset export_rollouts(const std::vector<RolloutLog>& rollouts, const DatasetMeta& parent,
                              double dt, const std::string& provenance, double tracking_gate) {
  MotionDataset out;
  out.meta.dt = dt;
  out.meta.dof = parent.dof;
  out.meta.gait = parent.gait;
  out.meta.iteration = parent.iteration + 1;
  out.meta.provenance = provenance;
  int idx = 0;
  for (const auto& r : rollouts) {
    ++idx;
    if (r.fell) continue;
    if (tracking_gate > 0.0 && r.tracking_error > tracking_gate) continue;
    if (r.frames.empty()) continue;
    MotionClip clip;
    clip.label = "rollout_" + std::to_string(idx - 1);
    clip.frames = r.frames;
    out.clips.push_back(std::move(clip));
  }
  if (out.clips.empty())
    throw ValidationError("no eligible rollouts to export (all fell or missed the gate)");
  return out;
}

}  // namespace solo9
