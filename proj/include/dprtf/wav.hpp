#ifndef DPRTF_WAV_HPP
#define DPRTF_WAV_HPP

#include <string>
#include <vector>

namespace dprtf {

struct WavData {
  std::vector<std::vector<double>> channels;  // one vector per channel
  double sample_rate = 16000.0;
};

enum class WavFormat { Pcm16, Float32 };

// PCM 16-bit and IEEE float 32-bit RIFF/WAVE only.
WavData read_wav(const std::string &path);
void write_wav(const std::string &path, const WavData &data,
               WavFormat format = WavFormat::Float32);

}  // namespace dprtf

#endif
