// Copyright 2026 The safemetric Authors.
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

#ifndef SAFEMETRIC_SAFEMETRIC_HPP_
#define SAFEMETRIC_SAFEMETRIC_HPP_

#include "safemetric/assignment.hpp"
#include "safemetric/clear_metrics.hpp"
#include "safemetric/collision_relevance.hpp"
#include "safemetric/config.hpp"
#include "safemetric/error.hpp"
#include "safemetric/fixtures.hpp"
#include "safemetric/geometry.hpp"
#include "safemetric/iou_verification.hpp"
#include "safemetric/kitti.hpp"
#include "safemetric/perception_time.hpp"
#include "safemetric/report_io.hpp"
#include "safemetric/safety.hpp"
#include "safemetric/scenario.hpp"

#endif  // SAFEMETRIC_SAFEMETRIC_HPP_
