#pragma once

// Execution-Cache-Memory performance model for streaming loop kernels.

#include "ecm/error.hpp"
#include "ecm/rational.hpp"
#include "ecm/machine.hpp"
#include "ecm/machine_io.hpp"
#include "ecm/kernel.hpp"
#include "ecm/kernel_io.hpp"
#include "ecm/scheduler.hpp"
#include "ecm/traffic.hpp"
#include "ecm/model.hpp"
#include "ecm/notation.hpp"
#include "ecm/measurements.hpp"
#include "ecm/scaling.hpp"
#include "ecm/golden.hpp"
