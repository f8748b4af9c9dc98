#pragma once

#include "category.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "forest.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "model_io.hpp"
#include "parallel.hpp"
#include "propagation.hpp"
#include "rng.hpp"
#include "scene.hpp"
#include "traverse.hpp"
