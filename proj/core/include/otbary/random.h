// Copyright 2026 The otbary Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef OTBARY_RANDOM_H_
#define OTBARY_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace otbary {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a path of stream
// identifiers. Every random stream in the library is keyed this way so that
// results never depend on evaluation order or thread scheduling.
constexpr uint64_t DeriveSeed(uint64_t seed,
                              std::initializer_list<uint64_t> path) {
  uint64_t h = MixBits(seed);
  for (uint64_t id : path) h = MixBits(h ^ MixBits(id + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng MakeRng(uint64_t seed) { return Rng(seed); }

}  // namespace otbary

#endif  // OTBARY_RANDOM_H_
