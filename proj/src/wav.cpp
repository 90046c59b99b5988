#include "dprtf/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dprtf {

namespace {

template <typename T>
T read_le(std::istream &in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char *>(buf), sizeof(T));
  if (!in) throw std::runtime_error("wav: truncated file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T out;
  std::memcpy(&out, &v, sizeof(T));
  return out;
}

template <typename T>
void write_le(std::ostream &out, T value) {
  std::uint64_t v = 0;
  std::memcpy(&v, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

WavData read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open " + path);
  char tag[4];
  in.read(tag, 4);
  if (!in || std::strncmp(tag, "RIFF", 4) != 0)
    throw std::runtime_error("wav: not a RIFF file: " + path);
  read_le<std::uint32_t>(in);  // riff size
  in.read(tag, 4);
  if (!in || std::strncmp(tag, "WAVE", 4) != 0)
    throw std::runtime_error("wav: not a WAVE file: " + path);

  std::uint16_t format = 0, num_channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  WavData data;
  while (in.read(tag, 4)) {
    const std::uint32_t chunk_size = read_le<std::uint32_t>(in);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      format = read_le<std::uint16_t>(in);
      num_channels = read_le<std::uint16_t>(in);
      sample_rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::strncmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw std::runtime_error("wav: data before fmt chunk");
      if (num_channels == 0) throw std::runtime_error("wav: zero channels");
      const bool pcm16 = format == 1 && bits == 16;
      const bool f32 = format == 3 && bits == 32;
      if (!pcm16 && !f32)
        throw std::runtime_error("wav: only PCM16 and float32 supported");
      const std::size_t bytes_per_sample = bits / 8;
      const std::size_t total = chunk_size / (bytes_per_sample * num_channels);
      data.channels.assign(num_channels, std::vector<double>(total));
      for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t ch = 0; ch < num_channels; ++ch) {
          if (pcm16)
            data.channels[ch][i] = read_le<std::int16_t>(in) / 32768.0;
          else
            data.channels[ch][i] = read_le<float>(in);
        }
      }
      data.sample_rate = sample_rate;
      return data;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  throw std::runtime_error("wav: no data chunk in " + path);
}

void write_wav(const std::string &path, const WavData &data, WavFormat format) {
  if (data.channels.empty() || data.channels[0].empty())
    throw std::invalid_argument("wav: nothing to write");
  const std::size_t num_channels = data.channels.size();
  const std::size_t frames = data.channels[0].size();
  for (const auto &ch : data.channels) {
    if (ch.size() != frames)
      throw std::invalid_argument("wav: channel length mismatch");
  }
  const bool pcm16 = format == WavFormat::Pcm16;
  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(frames * num_channels * bytes_per_sample);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("wav: cannot write " + path);
  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, pcm16 ? 1 : 3);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(num_channels));
  const std::uint32_t sr = static_cast<std::uint32_t>(data.sample_rate);
  write_le<std::uint32_t>(out, sr);
  write_le<std::uint32_t>(
      out, static_cast<std::uint32_t>(sr * num_channels * bytes_per_sample));
  write_le<std::uint16_t>(
      out, static_cast<std::uint16_t>(num_channels * bytes_per_sample));
  write_le<std::uint16_t>(out, pcm16 ? 16 : 32);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t ch = 0; ch < num_channels; ++ch) {
      const double v = data.channels[ch][i];
      if (pcm16) {
        const double clamped = std::clamp(v, -1.0, 1.0);
        write_le<std::int16_t>(
            out, static_cast<std::int16_t>(std::lround(clamped * 32767.0)));
      } else {
        write_le<float>(out, static_cast<float>(v));
      }
    }
  }
}

}  // namespace dprtf
