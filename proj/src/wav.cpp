// Copyright (c) 2026 The sqagen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqagen/wav.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "sqagen/errors.hpp"

namespace sqagen {
namespace {

void put_u32(AudioBytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(AudioBytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(AudioBytes& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}
std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}
bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

AudioBytes encode_wav_pcm16(std::span<const std::int16_t> samples, int sample_rate, int channels) {
  if (sample_rate <= 0 || channels <= 0) throw InvariantViolation("bad WAV sample rate or channel count");
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  AudioBytes out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate * channels * 2));
  put_u16(out, static_cast<std::uint16_t>(channels * 2));
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (std::int16_t s : samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

WavInfo parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw InvariantViolation("payload is not a RIFF/WAVE container");
  }
  WavInfo info;
  bool have_fmt = false;
  std::size_t block_align = 0;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::uint32_t size = get_u32(bytes, at + 4);
    const std::size_t body = at + 8;
    if (tag_is(bytes, at, "fmt ")) {
      if (size < 16 || body + 16 > bytes.size()) throw InvariantViolation("truncated WAV fmt chunk");
      const std::uint16_t format = get_u16(bytes, body);
      if (format != 1 && format != 3 && format != 0xFFFE) {
        throw InvariantViolation("unsupported WAV format tag " + std::to_string(format));
      }
      info.channels = get_u16(bytes, body + 2);
      info.sample_rate = static_cast<int>(get_u32(bytes, body + 4));
      block_align = get_u16(bytes, body + 12);
      info.bits_per_sample = get_u16(bytes, body + 14);
      have_fmt = true;
    } else if (tag_is(bytes, at, "data")) {
      if (!have_fmt || block_align == 0) throw InvariantViolation("WAV data chunk before fmt chunk");
      // Streaming writers leave the size as 0xFFFFFFFF; use what is present.
      const std::size_t available = bytes.size() - body;
      const std::size_t data = std::min<std::size_t>(size, available);
      info.frames = data / block_align;
      return info;
    }
    at = body + size + (size & 1);
  }
  throw InvariantViolation("WAV payload has no data chunk");
}

}  // namespace sqagen
