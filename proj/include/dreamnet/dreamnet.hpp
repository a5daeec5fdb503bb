#pragma once

#include "dreamnet/config.hpp"
#include "dreamnet/dreaming.hpp"
#include "dreamnet/glauber.hpp"
#include "dreamnet/kernel.hpp"
#include "dreamnet/linalg.hpp"
#include "dreamnet/manifest.hpp"
#include "dreamnet/meanfield.hpp"
#include "dreamnet/parallel.hpp"
#include "dreamnet/patterns.hpp"
#include "dreamnet/quadrature.hpp"
#include "dreamnet/rng.hpp"
