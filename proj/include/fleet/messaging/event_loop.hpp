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

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

namespace fleet::messaging {

/// Single-threaded discrete-event loop driving the virtual clock. Tasks due at
/// the same instant run in the order they were scheduled.
class EventLoop
{
public:
  using Task = std::function<void()>;

  TimeNs now() const { return _now; }

  /// Tasks scheduled in the past run at the current time.
  void schedule_at(TimeNs at, Task task);
  void schedule_after(TimeNs delay, Task task);

  /// Calls `fn` at `first`, then every `period` while it returns true.
  void schedule_every(TimeNs first, TimeNs period, std::function<bool()> fn);

  /// Runs every task due at or before `until`, then parks the clock there.
  std::size_t run_until(TimeNs until);

  /// Drains the queue completely.
  std::size_t run();

  bool empty() const { return _queue.empty(); }
  std::size_t pending() const { return _queue.size(); }
  std::optional<TimeNs> next_time() const;

private:
  struct Item
  {
    TimeNs at;
    std::uint64_t seq;
    Task task;
  };

  struct Later
  {
    bool operator()(const Item& a, const Item& b) const
    {
      if (a.at != b.at)
        return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  TimeNs _now = 0;
  std::uint64_t _next_seq = 0;
  std::priority_queue<Item, std::vector<Item>, Later> _queue;
};

} // namespace fleet::messaging
