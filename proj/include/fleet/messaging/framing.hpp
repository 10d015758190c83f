/*
 * Copyright (C) 2026 Fleet Middleware Contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/
#pragma once

#include <fleet/messaging/envelope.hpp>

#include <json.hpp>

#include <optional>
#include <span>
#include <string>

namespace fleet::messaging {

std::string base64_encode(std::span<const std::uint8_t> bytes);
Bytes base64_decode(std::string_view text);

/// Hex-encoded SHA-256 digest.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// JSON form used on every external wire:
/// {"topic","msgType","msgId","sentAt","sender","payloadB64"}.
nlohmann::json envelope_to_json(const Envelope& envelope);

/// Throws InvalidArgument on missing or mistyped fields.
Envelope envelope_from_json(const nlohmann::json& json);

/// 4-byte big-endian length prefix followed by the UTF-8 JSON object.
Bytes encode_frame(const Envelope& envelope);

/// Incremental decoder for a byte stream of length-prefixed frames.
class FrameDecoder
{
public:
  explicit FrameDecoder(std::size_t max_frame = 64u << 20);

  void feed(std::span<const std::uint8_t> bytes);

  /// Next complete envelope, if one is buffered. Throws InvalidArgument on an
  /// oversized or malformed frame.
  std::optional<Envelope> next();

  std::size_t buffered() const { return _buffer.size(); }

private:
  std::size_t _max_frame;
  Bytes _buffer;
};

} // namespace fleet::messaging
