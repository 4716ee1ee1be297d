#pragma once

#include "closed_forms.hpp"
#include "error.hpp"
#include "montecarlo.hpp"
#include "poly_boundary.hpp"
#include "quadrature.hpp"
#include "residual.hpp"
#include "rng.hpp"
#include "transform.hpp"
