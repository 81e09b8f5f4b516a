#pragma once

#include "gcr/clustering.hpp"
#include "gcr/core.hpp"
#include "gcr/estimator.hpp"
#include "gcr/experiments.hpp"
#include "gcr/exposure.hpp"
#include "gcr/generators.hpp"
#include "gcr/graph.hpp"
#include "gcr/rng.hpp"
#include "gcr/serialization.hpp"
