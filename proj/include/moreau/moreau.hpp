#pragma once

#include "moreau/extreal.hpp"
#include "moreau/grid.hpp"
#include "moreau/kernel.hpp"
#include "moreau/conjugacy.hpp"
#include "moreau/covering.hpp"
#include "moreau/quasilinear.hpp"
#include "moreau/trend.hpp"
#include "moreau/convergence.hpp"
#include "moreau/gartner.hpp"
#include "moreau/merton.hpp"
