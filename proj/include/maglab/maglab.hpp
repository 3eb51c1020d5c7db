#pragma once

// Umbrella header.

#include "maglab/asymptotics.hpp"
#include "maglab/experiments.hpp"
#include "maglab/model.hpp"
#include "maglab/moments.hpp"
#include "maglab/numeric.hpp"
#include "maglab/rng.hpp"
#include "maglab/sampler.hpp"
