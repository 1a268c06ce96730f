#pragma once

#include "ttbeam/channel.hpp"
#include "ttbeam/common.hpp"
#include "ttbeam/config.hpp"
#include "ttbeam/evaluator.hpp"
#include "ttbeam/fitness.hpp"
#include "ttbeam/harness.hpp"
#include "ttbeam/pso.hpp"
#include "ttbeam/rng.hpp"
#include "ttbeam/transceiver.hpp"
#include "ttbeam/waterfill.hpp"
