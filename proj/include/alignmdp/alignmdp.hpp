// Copyright 2026 The alignmdp Authors
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

#pragma once

#include "alignmdp/agents.hpp"
#include "alignmdp/alignment.hpp"
#include "alignmdp/bellman.hpp"
#include "alignmdp/chain.hpp"
#include "alignmdp/error.hpp"
#include "alignmdp/extended_value.hpp"
#include "alignmdp/generators.hpp"
#include "alignmdp/io.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/policy_enum.hpp"
#include "alignmdp/prng.hpp"
#include "alignmdp/repro.hpp"
#include "alignmdp/solver.hpp"
#include "alignmdp/version.hpp"
