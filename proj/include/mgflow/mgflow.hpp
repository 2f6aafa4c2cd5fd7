#pragma once

#include "mgflow/errors.hpp"
#include "mgflow/torus_field.hpp"
#include "mgflow/momentum_poly.hpp"
#include "mgflow/cascade.hpp"
#include "mgflow/families.hpp"
#include "mgflow/appendix.hpp"
#include "mgflow/energy_level.hpp"
#include "mgflow/dynamics.hpp"
#include "mgflow/io.hpp"
#include "mgflow/checks.hpp"
