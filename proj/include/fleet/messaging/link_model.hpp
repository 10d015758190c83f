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

#include <cstddef>

namespace fleet::messaging {

/// Point-to-point link characteristics between two hosts.
struct LinkModel
{
  double base_latency = 0.002;   // seconds
  double bandwidth = 12.5e6;     // bytes per second
  double jitter = 0.0;           // uniform half-width, seconds
  double loss_rate = 0.0;        // probability in [0, 1)

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;

  /// One-way transit time for a payload given a jitter draw in
  /// [-jitter, +jitter]. Never negative.
  TimeNs transit(std::size_t payload_bytes, double jitter_draw) const;
};

} // namespace fleet::messaging
