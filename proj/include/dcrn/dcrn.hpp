#pragma once

// Umbrella header.

#include "dcrn/certificate.hpp"
#include "dcrn/dynamics.hpp"
#include "dcrn/equilibrium.hpp"
#include "dcrn/errors.hpp"
#include "dcrn/expression.hpp"
#include "dcrn/geometry.hpp"
#include "dcrn/history.hpp"
#include "dcrn/linalg.hpp"
#include "dcrn/lp.hpp"
#include "dcrn/network.hpp"
#include "dcrn/parser.hpp"
#include "dcrn/quadrature.hpp"
#include "dcrn/report.hpp"
#include "dcrn/structure.hpp"
