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
#include <fleet/messaging/event_loop.hpp>

#include <memory>

namespace fleet::messaging {

void EventLoop::schedule_at(TimeNs at, Task task)
{
  if (at < _now)
    at = _now;
  _queue.push(Item{at, _next_seq++, std::move(task)});
}

void EventLoop::schedule_after(TimeNs delay, Task task)
{
  schedule_at(_now + (delay > 0 ? delay : 0), std::move(task));
}

void EventLoop::schedule_every(
  TimeNs first, TimeNs period, std::function<bool()> fn)
{
  auto shared = std::make_shared<std::function<bool()>>(std::move(fn));
  auto step = std::make_shared<std::function<void()>>();
  std::weak_ptr<std::function<void()>> weak_step = step;
  *step = [this, shared, period, weak_step]()
    {
      if (!(*shared)())
        return;
      if (auto self = weak_step.lock())
        schedule_after(period, [self]() { (*self)(); });
    };
  schedule_at(first, [step]() { (*step)(); });
}

std::size_t EventLoop::run_until(TimeNs until)
{
  std::size_t count = 0;
  while (!_queue.empty() && _queue.top().at <= until)
  {
    // The task may schedule more work, so pop before invoking.
    Item item = std::move(const_cast<Item&>(_queue.top()));
    _queue.pop();
    _now = item.at;
    item.task();
    ++count;
  }
  if (until > _now)
    _now = until;
  return count;
}

std::size_t EventLoop::run()
{
  std::size_t count = 0;
  while (!_queue.empty())
  {
    Item item = std::move(const_cast<Item&>(_queue.top()));
    _queue.pop();
    _now = item.at;
    item.task();
    ++count;
  }
  return count;
}

std::optional<TimeNs> EventLoop::next_time() const
{
  if (_queue.empty())
    return std::nullopt;
  return _queue.top().at;
}

} // namespace fleet::messaging
