// Copyright 2026 The nlirobust Authors
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

// Umbrella header for the whole library.

#include "nlirobust/augment.hpp"
#include "nlirobust/bpe.hpp"
#include "nlirobust/cli.hpp"
#include "nlirobust/corpus.hpp"
#include "nlirobust/digest.hpp"
#include "nlirobust/error.hpp"
#include "nlirobust/inverse.hpp"
#include "nlirobust/lexicon.hpp"
#include "nlirobust/llmclient.hpp"
#include "nlirobust/parallel.hpp"
#include "nlirobust/report.hpp"
#include "nlirobust/rng.hpp"
#include "nlirobust/stats.hpp"
#include "nlirobust/tokenstats.hpp"
#include "nlirobust/transforms.hpp"
#include "nlirobust/unicode.hpp"
#include "nlirobust/variants.hpp"
#include "nlirobust/wordpiece.hpp"
