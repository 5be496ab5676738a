#pragma once

#include "specfun.hpp"
#include "quadrature.hpp"
#include "cev_distribution.hpp"
#include "black_scholes.hpp"
#include "pricer.hpp"
#include "asymptotics.hpp"
#include "mgf.hpp"
#include "monte_carlo.hpp"
