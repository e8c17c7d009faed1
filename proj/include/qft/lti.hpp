#pragma once

#include "qft/lti/polynomial.hpp"
#include "qft/lti/simulate.hpp"
#include "qft/lti/state_space.hpp"
#include "qft/lti/transfer_function.hpp"
