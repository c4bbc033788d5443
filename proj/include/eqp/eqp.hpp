#pragma once

#include "eqp/bs.hpp"
#include "eqp/equilibrium.hpp"
#include "eqp/errors.hpp"
#include "eqp/implied_vol.hpp"
#include "eqp/model.hpp"
#include "eqp/numerics.hpp"
#include "eqp/oracle.hpp"
#include "eqp/physical.hpp"
#include "eqp/report.hpp"
#include "eqp/sweep.hpp"
