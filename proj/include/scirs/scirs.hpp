#pragma once

#include "errors.hpp"
#include "integrator.hpp"
#include "matrix3.hpp"
#include "model.hpp"
#include "params.hpp"
#include "state.hpp"
#include "stability.hpp"
