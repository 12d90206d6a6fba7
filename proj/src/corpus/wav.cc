// corpus/wav.cc

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "corpus/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "base/error.h"

namespace speechmark {

namespace {

struct WavFormat {
  uint16_t audio_format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

uint32_t ReadU32LE(std::ifstream &in, const std::string &path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char *>(b), 4);
  if (!in) throw IoError("truncated WAV file: " + path);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t ReadU16LE(std::ifstream &in, const std::string &path) {
  unsigned char b[2];
  in.read(reinterpret_cast<char *>(b), 2);
  if (!in) throw IoError("truncated WAV file: " + path);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

}  // namespace

std::vector<double> ResampleLinear(const std::vector<double> &samples,
                                   int src_rate, int dst_rate) {
  if (src_rate == dst_rate || samples.empty()) return samples;
  double ratio = static_cast<double>(dst_rate) / src_rate;
  size_t out_len = samples.size() == 1
                       ? 1
                       : static_cast<size_t>(std::floor((samples.size() - 1) * ratio)) + 1;
  std::vector<double> out(out_len);
  for (size_t i = 0; i < out_len; ++i) {
    double pos = i / ratio;
    size_t lo = static_cast<size_t>(pos);
    if (lo >= samples.size() - 1) {
      out[i] = samples.back();
    } else {
      double frac = pos - lo;
      out[i] = samples[lo] * (1.0 - frac) + samples[lo + 1] * frac;
    }
  }
  return out;
}

AudioSignal ReadAudio(const std::string &path, int target_rate) {
  SM_REQUIRE(target_rate > 0, ConfigError, "target sample rate must be > 0");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    throw IoError("not a RIFF file: " + path);
  ReadU32LE(in, path);  // overall size, unused
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    throw IoError("not a WAVE file: " + path);

  WavFormat fmt;
  std::vector<unsigned char> data;
  bool have_fmt = false, have_data = false;
  while (in.read(tag, 4)) {
    uint32_t chunk_size = ReadU32LE(in, path);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      fmt.audio_format = ReadU16LE(in, path);
      fmt.channels = ReadU16LE(in, path);
      fmt.sample_rate = ReadU32LE(in, path);
      ReadU32LE(in, path);  // byte rate
      ReadU16LE(in, path);  // block align
      fmt.bits_per_sample = ReadU16LE(in, path);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(chunk_size);
      in.read(reinterpret_cast<char *>(data.data()), chunk_size);
      if (!in) throw IoError("truncated data chunk in " + path);
      have_data = true;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
    if (have_fmt && have_data) break;
  }
  if (!have_fmt || !have_data)
    throw IoError("missing fmt/data chunk in " + path);
  if (fmt.audio_format != 1)
    throw IoError("unsupported WAV encoding " + std::to_string(fmt.audio_format) +
                  " in " + path + " (PCM only)");
  if (fmt.bits_per_sample != 8 && fmt.bits_per_sample != 16)
    throw IoError("unsupported bit depth " + std::to_string(fmt.bits_per_sample) +
                  " in " + path + " (8/16-bit PCM only)");
  if (fmt.channels == 0) throw IoError("zero channels in " + path);
  if (fmt.sample_rate == 0) throw IoError("zero sample rate in " + path);

  size_t bytes_per_sample = fmt.bits_per_sample / 8;
  size_t frame_bytes = bytes_per_sample * fmt.channels;
  size_t n_frames = data.size() / frame_bytes;
  if (n_frames == 0) throw InputError("empty audio file: " + path);

  std::vector<double> mono(n_frames);
  for (size_t t = 0; t < n_frames; ++t) {
    double acc = 0.0;
    for (int c = 0; c < fmt.channels; ++c) {
      const unsigned char *p = data.data() + t * frame_bytes + c * bytes_per_sample;
      if (fmt.bits_per_sample == 16) {
        int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
        acc += v / 32768.0;
      } else {
        acc += (static_cast<int>(p[0]) - 128) / 128.0;
      }
    }
    mono[t] = acc / fmt.channels;
  }

  AudioSignal signal;
  signal.samples = ResampleLinear(mono, static_cast<int>(fmt.sample_rate), target_rate);
  signal.sample_rate = target_rate;
  return signal;
}

void WriteWav16(const std::string &path, const std::vector<double> &samples,
                int sample_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  auto put_u32 = [&](uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  auto put_u16 = [&](uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
  };
  uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<uint32_t>(sample_rate));
  put_u32(static_cast<uint32_t>(sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);
  for (double s : samples) {
    long v = std::lround(std::clamp(s, -1.0, 1.0) * 32768.0);
    v = std::clamp(v, -32768L, 32767L);
    put_u16(static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  out.close();
  if (out.fail()) throw IoError("write failed: " + path);
}

}  // namespace speechmark
