// Copyright 2026 The tdg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Everything except the network drafting client (tdg/authoring_http.hpp).

#include "tdg/numeric.hpp"
#include "tdg/rng.hpp"
#include "tdg/template_dsl.hpp"
#include "tdg/template_file.hpp"
#include "tdg/lexicon.hpp"
#include "tdg/sampler.hpp"
#include "tdg/renderer.hpp"
#include "tdg/solver_lang.hpp"
#include "tdg/verifier.hpp"
#include "tdg/dataset_io.hpp"
#include "tdg/pipeline.hpp"
#include "tdg/corpus.hpp"
#include "tdg/reward_oracle.hpp"
#include "tdg/authoring.hpp"
