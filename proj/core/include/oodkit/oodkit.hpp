/*
 * Copyright 2026 The oodkit authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OODKIT_OODKIT_HPP_
#define OODKIT_OODKIT_HPP_

#include "oodkit/checkpoint.hpp"
#include "oodkit/class_stats.hpp"
#include "oodkit/errors.hpp"
#include "oodkit/evaluation.hpp"
#include "oodkit/gamma.hpp"
#include "oodkit/layers.hpp"
#include "oodkit/losses.hpp"
#include "oodkit/metrics.hpp"
#include "oodkit/model.hpp"
#include "oodkit/optim.hpp"
#include "oodkit/parallel.hpp"
#include "oodkit/presets.hpp"
#include "oodkit/rng.hpp"
#include "oodkit/scores.hpp"
#include "oodkit/synthetic.hpp"
#include "oodkit/tensor.hpp"
#include "oodkit/tensor_io.hpp"
#include "oodkit/training.hpp"

#endif  // OODKIT_OODKIT_HPP_
