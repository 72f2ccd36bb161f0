#include "toch/toch_io.hpp"

#include "toch/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace toch {

static_assert(std::endian::native == std::endian::little, "TOCH I/O assumes a little-endian host");

namespace {

class Writer {
 public:
  template <typename T>
  void put(T value) {
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    out_.append(raw, sizeof(T));
  }
  void put_f32(double v) { put(static_cast<float>(v)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) {
      fail(ErrorCode::Parse, source_ + ": truncated TOCH file at byte " + std::to_string(pos_));
    }
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  double get_f32() { return static_cast<double>(get<float>()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_toch(const TochSequence& seq) {
  seq.validate();
  Writer w;
  w.put('T');
  w.put('O');
  w.put('C');
  w.put('H');
  w.put<std::uint32_t>(kTochFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(seq.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(seq.point_count()));
  w.put<std::uint64_t>(seq.points->seed);
  for (const auto& f : seq.frames) {
    for (int i = 0; i < f.size(); ++i) {
      w.put<std::uint8_t>(f.c[i] ? 1 : 0);
      w.put_f32(f.d[i]);
      for (int k = 0; k < 3; ++k) w.put_f32(f.y(i, k));
    }
  }
  const auto& p = *seq.points;
  for (int i = 0; i < p.size(); ++i) {
    for (int k = 0; k < 3; ++k) w.put_f32(p.points(i, k));
    for (int k = 0; k < 3; ++k) w.put_f32(p.normals(i, k));
  }
  return w.take();
}

TochSequence decode_toch(const std::string& bytes, const std::string& source) {
  Reader r(bytes, source);
  char magic[4];
  for (char& ch : magic) ch = r.get<char>();
  if (std::string(magic, 4) != "TOCH") fail(ErrorCode::Parse, source + ": bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kTochFormatVersion) {
    fail(ErrorCode::Parse, source + ": unsupported TOCH version " + std::to_string(version));
  }
  const auto t = r.get<std::uint32_t>();
  const auto n = r.get<std::uint32_t>();
  const auto seed = r.get<std::uint64_t>();

  std::vector<TochFrame> frames(t);
  for (auto& f : frames) {
    f.c.resize(n);
    f.d.resize(n);
    f.y.resize(n, 3);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto c = r.get<std::uint8_t>();
      if (c > 1) fail(ErrorCode::Parse, source + ": correspondence flag must be 0 or 1");
      f.c[i] = c;
      f.d[i] = r.get_f32();
      for (int k = 0; k < 3; ++k) f.y(i, k) = r.get_f32();
    }
  }
  auto points = std::make_shared<ObjectPointSet>();
  points->seed = seed;
  points->points.resize(n, 3);
  points->normals.resize(n, 3);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) points->points(i, k) = r.get_f32();
    for (int k = 0; k < 3; ++k) points->normals(i, k) = r.get_f32();
  }
  if (!r.done()) fail(ErrorCode::Parse, source + ": trailing bytes after TOCH payload");

  TochSequence seq;
  seq.points = points;
  for (auto& f : frames) f.points = points;
  seq.frames = std::move(frames);
  return seq;
}

void write_toch(const std::filesystem::path& path, const TochSequence& seq) {
  const std::string bytes = encode_toch(seq);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

TochSequence read_toch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return decode_toch(buffer.str(), path.string());
}

}  // namespace toch
