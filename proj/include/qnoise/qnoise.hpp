// Copyright 2026 The qnoise Authors
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

#include "qnoise/circuit.hpp"
#include "qnoise/circuit_io.hpp"
#include "qnoise/dataset.hpp"
#include "qnoise/dataset_io.hpp"
#include "qnoise/distance.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/features.hpp"
#include "qnoise/gates.hpp"
#include "qnoise/gbdt.hpp"
#include "qnoise/generate.hpp"
#include "qnoise/linear.hpp"
#include "qnoise/matrix.hpp"
#include "qnoise/metrics.hpp"
#include "qnoise/model_io.hpp"
#include "qnoise/nn.hpp"
#include "qnoise/noise.hpp"
#include "qnoise/parallel.hpp"
#include "qnoise/prng.hpp"
#include "qnoise/qasm.hpp"
#include "qnoise/sim.hpp"
#include "qnoise/statevector.hpp"
#include "qnoise/text.hpp"
#include "qnoise/train.hpp"
