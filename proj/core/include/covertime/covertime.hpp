#pragma once

#include "covertime/continuous2d.hpp"
#include "covertime/environments.hpp"
#include "covertime/exact_analysis.hpp"
#include "covertime/graph.hpp"
#include "covertime/policies.hpp"
#include "covertime/rng.hpp"
#include "covertime/simulator.hpp"
