#pragma once

#include "huplab/errors.hpp"
#include "huplab/gaussmap.hpp"
#include "huplab/grid.hpp"
#include "huplab/measures.hpp"
#include "huplab/operators.hpp"
#include "huplab/parallel.hpp"
#include "huplab/quadrature.hpp"
#include "huplab/ulam.hpp"
#include "huplab/spectrum.hpp"
#include "huplab/escape.hpp"
#include "huplab/hyperbola_ft.hpp"
#include "huplab/separation.hpp"
