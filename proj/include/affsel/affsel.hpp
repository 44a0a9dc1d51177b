#pragma once

// Umbrella header for the whole library.

#include "dataset.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "rank.hpp"
#include "selector.hpp"
#include "svm.hpp"
#include "synth.hpp"
#include "wrapper.hpp"
