// Copyright 2026 The LightAlign Authors
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

#pragma once

#include <cstdint>
#include <string>

namespace lightalign {

// Synthetic benchmark pair: a weakly connected random source graph and an
// entity/relation-permuted copy. With probability `noise`, a target triple's
// tail is rewired to a uniform random entity, breaking the isomorphism
// locally while the reference alignment stays the full permutation.
struct SynthSpec {
  std::size_t entities = 1000;
  std::size_t triples = 4000;   // must be at least entities - 1
  double noise = 0.0;           // in [0, 1]
  std::uint64_t seed = 1;
};

// Writes ent_ids_1/2, triples_1/2, and ref_ent_ids under dir using the
// global ID convention (source 0..E-1, target E..2E-1). Byte-reproducible
// for a fixed spec.
void synth_dataset(const SynthSpec& spec, const std::string& dir);

}  // namespace lightalign
