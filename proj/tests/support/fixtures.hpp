// Copyright 2026 The tweakscale Authors
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

#ifndef TWEAKSCALE_TESTS_FIXTURES_HPP_
#define TWEAKSCALE_TESTS_FIXTURES_HPP_

#include "tweakscale/chains.hpp"
#include "tweakscale/dataset.hpp"
#include "tweakscale/linear.hpp"

namespace tweakscale::testing {

/// Four-table chain TD -> TC -> TB -> TA: a1 <- b1; a2 <- b2, b3; a3 <- b4, b5;
/// c1, c2 -> b2; c3 -> b3; c4 -> b4; c5 -> b5; d1, d2, d3 -> c4; d4, d5 -> c5.
Dataset linearSample();
ReferenceChain linearSampleChain();

/// TA, TB, TC reference TK and TH. <k1,h2> appears 3, 3, 1 times; <k2,h3>
/// and <k3,h1> appear 1, 1, 2 times.
Dataset coappearSample();

/// Users u1, u2. u1 owns p1, p2; u2 owns p3. u1 responds twice to p3; u2
/// responds four times across p1 and p2.
Dataset pairwiseSample();

/// The 3x3 matrices whose mean relative error is 5/18: `actual` holds
/// (5; 2, 3) and `truth` holds (4; 3, 4).
LinearJoinMatrix errorExampleActual();
LinearJoinMatrix errorExampleTruth();

}  // namespace tweakscale::testing

#endif  // TWEAKSCALE_TESTS_FIXTURES_HPP_
