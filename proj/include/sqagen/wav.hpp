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

#ifndef SQAGEN_WAV_HPP_
#define SQAGEN_WAV_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sqagen {

using AudioBytes = std::vector<std::uint8_t>;

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::size_t frames = 0;

  double duration() const { return sample_rate > 0 ? static_cast<double>(frames) / sample_rate : 0.0; }
};

// 16-bit little-endian PCM in a canonical 44-byte RIFF/WAVE header.
AudioBytes encode_wav_pcm16(std::span<const std::int16_t> samples, int sample_rate, int channels = 1);

// Validates the RIFF/WAVE container and reads the fmt and data chunks.
// Throws InvariantViolation for anything that is not a PCM WAVE file.
WavInfo parse_wav(std::span<const std::uint8_t> bytes);

}  // namespace sqagen

#endif  // SQAGEN_WAV_HPP_
