// Copyright 2026 The lexaos Authors.
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

#include "lexaos/aos_model.hpp"
#include "lexaos/checkpoint.hpp"
#include "lexaos/corpus.hpp"
#include "lexaos/embeddings.hpp"
#include "lexaos/explainer.hpp"
#include "lexaos/llm_prompting.hpp"
#include "lexaos/metrics.hpp"
#include "lexaos/synthetic.hpp"
#include "lexaos/trainer.hpp"
