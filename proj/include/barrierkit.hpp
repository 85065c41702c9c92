// Copyright 2026 The barrierkit Authors
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

#ifndef BARRIERKIT_HPP
#define BARRIERKIT_HPP

// Everything except the command line front end (barrierkit/cli.hpp).

#include "barrierkit/errors.hpp"
#include "barrierkit/log.hpp"
#include "barrierkit/parallel.hpp"
#include "barrierkit/sysmodel.hpp"
#include "barrierkit/ode.hpp"
#include "barrierkit/saddle.hpp"
#include "barrierkit/tangency.hpp"
#include "barrierkit/barrier.hpp"
#include "barrierkit/filter.hpp"
#include "barrierkit/assemble.hpp"
#include "barrierkit/section.hpp"
#include "barrierkit/verify.hpp"
#include "barrierkit/acc_model.hpp"
#include "barrierkit/config.hpp"
#include "barrierkit/acc_pipeline.hpp"
#include "barrierkit/registry.hpp"
#include "barrierkit/export.hpp"

#endif  // BARRIERKIT_HPP
