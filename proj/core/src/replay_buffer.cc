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

#include "fm3q/replay_buffer.h"

#include "fm3q/errors.h"

namespace fm3q {

std::string BufferModeName(BufferMode mode) {
  return mode == BufferMode::kFull ? "full" : "bounded";
}

BufferMode BufferModeFromName(const std::string& name) {
  if (name == "full") return BufferMode::kFull;
  if (name == "bounded") return BufferMode::kBounded;
  throw InvalidArgument("unknown buffer mode '" + name + "'");
}

ReplayBuffer::ReplayBuffer(BufferMode mode, size_t capacity)
    : mode_(mode), capacity_(mode == BufferMode::kFull ? 0 : capacity) {
  if (mode == BufferMode::kBounded && capacity == 0) {
    throw InvalidArgument("a bounded replay buffer needs a positive capacity");
  }
}

void ReplayBuffer::Add(EpisodeStep step) {
  steps_.push_back(std::move(step));
  ++total_added_;
  if (mode_ == BufferMode::kBounded && steps_.size() > capacity_) {
    steps_.pop_front();
    ++evicted_;
  }
}

}  // namespace fm3q
