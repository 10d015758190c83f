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
#include <fleet/errors.hpp>
#include <fleet/messaging/framing.hpp>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <cstdio>

namespace fleet::messaging {

std::string base64_encode(std::span<const std::uint8_t> bytes)
{
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(
    reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
    static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

Bytes base64_decode(std::string_view text)
{
  if (text.size() % 4 != 0)
    throw Error(ErrorCode::InvalidArgument, "base64 length not a multiple of 4");
  Bytes out(3 * text.size() / 4);
  const int written = EVP_DecodeBlock(
    out.data(), reinterpret_cast<const unsigned char*>(text.data()),
    static_cast<int>(text.size()));
  if (written < 0)
    throw Error(ErrorCode::InvalidArgument, "malformed base64");

  // EVP_DecodeBlock does not strip the bytes produced by '=' padding.
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=')
    ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=')
    ++padding;
  out.resize(static_cast<std::size_t>(written) - padding);
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes)
{
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(bytes.data(), bytes.size(), digest.data());
  std::string hex;
  hex.reserve(2 * digest.size());
  char buf[3];
  for (const auto b : digest)
  {
    std::snprintf(buf, sizeof(buf), "%02x", b);
    hex += buf;
  }
  return hex;
}

nlohmann::json envelope_to_json(const Envelope& envelope)
{
  return nlohmann::json{
    {"topic", envelope.topic},
    {"msgType", envelope.msg_type},
    {"msgId", envelope.msg_id},
    {"sentAt", envelope.sent_at},
    {"sender", envelope.sender.qualified()},
    {"payloadB64", base64_encode(envelope.payload_view())},
  };
}

Envelope envelope_from_json(const nlohmann::json& json)
{
  try
  {
    Envelope envelope;
    envelope.topic = json.at("topic").get<std::string>();
    envelope.msg_type = json.at("msgType").get<std::string>();
    envelope.msg_id = json.at("msgId").get<std::uint64_t>();
    envelope.sent_at = json.at("sentAt").get<TimeNs>();
    envelope.sender = NodeId::parse(json.at("sender").get<std::string>());
    envelope.payload = make_payload(
      base64_decode(json.at("payloadB64").get<std::string>()));
    return envelope;
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorCode::InvalidArgument,
      std::string("malformed envelope: ") + e.what());
  }
}

Bytes encode_frame(const Envelope& envelope)
{
  const std::string body = envelope_to_json(envelope).dump();
  const auto length = static_cast<std::uint32_t>(body.size());
  Bytes frame;
  frame.reserve(4 + body.size());
  frame.push_back(static_cast<std::uint8_t>(length >> 24));
  frame.push_back(static_cast<std::uint8_t>(length >> 16));
  frame.push_back(static_cast<std::uint8_t>(length >> 8));
  frame.push_back(static_cast<std::uint8_t>(length));
  frame.insert(frame.end(), body.begin(), body.end());
  return frame;
}

//==============================================================================
FrameDecoder::FrameDecoder(std::size_t max_frame)
: _max_frame(max_frame)
{
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes)
{
  _buffer.insert(_buffer.end(), bytes.begin(), bytes.end());
}

std::optional<Envelope> FrameDecoder::next()
{
  if (_buffer.size() < 4)
    return std::nullopt;

  const std::size_t length =
    (std::size_t{_buffer[0]} << 24) | (std::size_t{_buffer[1]} << 16)
    | (std::size_t{_buffer[2]} << 8) | std::size_t{_buffer[3]};
  if (length > _max_frame)
    throw Error(ErrorCode::InvalidArgument,
      "frame of " + std::to_string(length) + " bytes exceeds limit");
  if (_buffer.size() < 4 + length)
    return std::nullopt;

  const std::string body(_buffer.begin() + 4, _buffer.begin() + 4 + length);
  _buffer.erase(_buffer.begin(), _buffer.begin() + 4 + length);

  nlohmann::json json;
  try
  {
    json = nlohmann::json::parse(body);
  }
  catch (const nlohmann::json::parse_error& e)
  {
    throw Error(ErrorCode::InvalidArgument,
      std::string("frame is not JSON: ") + e.what());
  }
  return envelope_from_json(json);
}

} // namespace fleet::messaging
