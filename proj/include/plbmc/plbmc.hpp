#pragma once

#include "circuit.hpp"
#include "cnf.hpp"
#include "desugar.hpp"
#include "driver.hpp"
#include "encoder.hpp"
#include "error.hpp"
#include "external_solver.hpp"
#include "formula.hpp"
#include "frontend.hpp"
#include "history.hpp"
#include "operational.hpp"
#include "sat.hpp"
#include "sexpr.hpp"
#include "trace.hpp"
