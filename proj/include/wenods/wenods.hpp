#pragma once

#include "wenods/autodiff.hpp"
#include "wenods/bench.hpp"
#include "wenods/cnn.hpp"
#include "wenods/euler.hpp"
#include "wenods/flux.hpp"
#include "wenods/mesh.hpp"
#include "wenods/random.hpp"
#include "wenods/reference.hpp"
#include "wenods/riemann.hpp"
#include "wenods/rk3.hpp"
#include "wenods/solve.hpp"
#include "wenods/training.hpp"
#include "wenods/weno.hpp"
