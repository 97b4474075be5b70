#pragma once

#include "coopsim/config.hpp"
#include "coopsim/control.hpp"
#include "coopsim/engine.hpp"
#include "coopsim/errors.hpp"
#include "coopsim/knowledge.hpp"
#include "coopsim/lab.hpp"
#include "coopsim/maze.hpp"
#include "coopsim/rng.hpp"
#include "coopsim/taskgraph.hpp"
