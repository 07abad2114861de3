#pragma once

// Everything in one include.

#include "circle_ergodic/core.hpp"
#include "circle_ergodic/ntt.hpp"
#include "circle_ergodic/laurent.hpp"
#include "circle_ergodic/weights.hpp"
#include "circle_ergodic/expsum.hpp"
#include "circle_ergodic/characters.hpp"
#include "circle_ergodic/singular.hpp"
#include "circle_ergodic/fit.hpp"
#include "circle_ergodic/arcs.hpp"
#include "circle_ergodic/ergodic.hpp"
#include "circle_ergodic/verify.hpp"
#include "circle_ergodic/io.hpp"
