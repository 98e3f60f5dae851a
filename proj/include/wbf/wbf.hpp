#pragma once

#include "wbf/error.hpp"
#include "wbf/measures.hpp"
#include "wbf/functionals.hpp"
#include "wbf/transport.hpp"
#include "wbf/jko.hpp"
#include "wbf/pde.hpp"
#include "wbf/diagnostics.hpp"
