// Copyright 2026 The PVisRec Authors.
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

#include "pvis/common.hpp"
#include "pvis/corpus.hpp"
#include "pvis/synth.hpp"
#include "pvis/metafeatures.hpp"
#include "pvis/graphs.hpp"
#include "pvis/candidates.hpp"
#include "pvis/ranking.hpp"
#include "pvis/factorization.hpp"
#include "pvis/neural.hpp"
#include "pvis/baselines.hpp"
#include "pvis/evaluation.hpp"
#include "pvis/pipeline.hpp"
