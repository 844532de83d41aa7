// Copyright 2026 The FM3Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FM3Q_REPLAY_BUFFER_H_
#define FM3Q_REPLAY_BUFFER_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>

#include "fm3q/game.h"

namespace fm3q {

enum class BufferMode {
  // Never evicts.
  kFull,
  // Evicts oldest-first beyond the capacity.
  kBounded,
};

std::string BufferModeName(BufferMode mode);
BufferMode BufferModeFromName(const std::string& name);

class ReplayBuffer {
 public:
  // capacity is ignored in full mode and must be positive otherwise.
  explicit ReplayBuffer(BufferMode mode = BufferMode::kFull, size_t capacity = 0);

  void Add(EpisodeStep step);
  // Oldest first.
  const EpisodeStep& at(size_t i) const { return steps_[i]; }
  size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  BufferMode mode() const { return mode_; }
  size_t capacity() const { return capacity_; }
  int64_t total_added() const { return total_added_; }
  int64_t evicted() const { return evicted_; }

 private:
  BufferMode mode_;
  size_t capacity_;
  std::deque<EpisodeStep> steps_;
  int64_t total_added_ = 0;
  int64_t evicted_ = 0;
};

}  // namespace fm3q

#endif  // FM3Q_REPLAY_BUFFER_H_
