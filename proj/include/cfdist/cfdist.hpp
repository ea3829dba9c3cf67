#pragma once

// Umbrella header: characteristic functions of classical multivariate test
// statistics, Gil-Pelaez numerical inversion to PDF/CDF/quantiles, and a
// Monte Carlo oracle for validation.

#include "cfdist/cf_library.hpp"
#include "cfdist/characteristic_function.hpp"
#include "cfdist/complex_gamma.hpp"
#include "cfdist/errors.hpp"
#include "cfdist/inversion.hpp"
#include "cfdist/oracle.hpp"
#include "cfdist/statistic_spec.hpp"
