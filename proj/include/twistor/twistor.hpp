#pragma once

#include "twistor/backlund.hpp"
#include "twistor/circle.hpp"
#include "twistor/errors.hpp"
#include "twistor/field.hpp"
#include "twistor/field_io.hpp"
#include "twistor/gluing.hpp"
#include "twistor/gluing_builder.hpp"
#include "twistor/ode.hpp"
#include "twistor/parallel.hpp"
#include "twistor/pde.hpp"
#include "twistor/riemann.hpp"
#include "twistor/scaffold.hpp"
