// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The widop Authors

#pragma once

// Everything except the command-line front end (widop/cli.hpp, which needs CLI11).

#include "widop/domain.hpp"
#include "widop/engine.hpp"
#include "widop/error.hpp"
#include "widop/evaluation.hpp"
#include "widop/fitting.hpp"
#include "widop/geometry.hpp"
#include "widop/kb.hpp"
#include "widop/kb_io.hpp"
#include "widop/pipeline.hpp"
#include "widop/planner.hpp"
#include "widop/pointcloud.hpp"
#include "widop/processing.hpp"
#include "widop/rules.hpp"
#include "widop/seed.hpp"
#include "widop/settings.hpp"
#include "widop/synthscene.hpp"
#include "widop/text.hpp"
#include "widop/topology.hpp"
#include "widop/vrml.hpp"
