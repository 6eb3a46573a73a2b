#pragma once

#include "sharpiv/bounds.hpp"
#include "sharpiv/classify.hpp"
#include "sharpiv/data.hpp"
#include "sharpiv/error.hpp"
#include "sharpiv/learners.hpp"
#include "sharpiv/normal.hpp"
#include "sharpiv/nuisance.hpp"
#include "sharpiv/outcomes.hpp"
#include "sharpiv/quadrature.hpp"
#include "sharpiv/sharpness.hpp"
#include "sharpiv/simlab.hpp"
