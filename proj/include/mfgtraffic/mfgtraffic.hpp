#pragma once

#include "mfgtraffic/adp_stepper.hpp"
#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"
#include "mfgtraffic/diagnostics.hpp"
#include "mfgtraffic/fk_solver.hpp"
#include "mfgtraffic/gradient_check.hpp"
#include "mfgtraffic/hjb_residual.hpp"
#include "mfgtraffic/mc_oracle.hpp"
#include "mfgtraffic/output.hpp"
#include "mfgtraffic/policy.hpp"
#include "mfgtraffic/value_basis.hpp"
