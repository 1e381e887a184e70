// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The scmad2d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCMAD2D_SCMAD2D_HPP
#define SCMAD2D_SCMAD2D_HPP

#include "scmad2d/capacity.hpp"
#include "scmad2d/channel.hpp"
#include "scmad2d/config.hpp"
#include "scmad2d/convex_form.hpp"
#include "scmad2d/errors.hpp"
#include "scmad2d/experiments.hpp"
#include "scmad2d/gp_solver.hpp"
#include "scmad2d/hermitian_eigen.hpp"
#include "scmad2d/posynomial.hpp"
#include "scmad2d/power_allocator.hpp"
#include "scmad2d/random.hpp"
#include "scmad2d/scma.hpp"

#endif  // SCMAD2D_SCMAD2D_HPP
