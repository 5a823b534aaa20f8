// Config-facing constructors: catalog spec strings ("power(2)",
// "step(1,0,1)") and CSV-backed sampled objects, matching the conventions
// shared by comparison functions, time functions, input signals and
// generators.
#pragma once

#include <string>

#include "isslab/compfun.hpp"
#include "isslab/evolution.hpp"
#include "isslab/mildsolve.hpp"
#include "isslab/timefun.hpp"

namespace isslab {

ComparisonFn comparison_from_spec(const std::string& spec);
// Two-column CSV (argument, value).
ComparisonFn comparison_from_csv(const std::string& path);

TimeFun timefun_from_spec(const std::string& spec);
TimeFun timefun_from_csv(const std::string& path);

// zero, constant(v), step(t_jump, before, after), sine(amp, freq[, phase]);
// scalar values broadcast over a unit profile of the given dimension.
InputSignal input_from_spec(const std::string& spec, int dim);
// Rows: time, u_1 .. u_m (piecewise-linear interpolation per component).
InputSignal input_from_csv(const std::string& path);

// Rows: t_start, A row-major (dim*dim entries). Piecewise-constant matrix
// generator; propagation uses exact exponentials per block.
GeneratorSpec generator_from_blocks_csv(const std::string& path, int dim);

}  // namespace isslab
