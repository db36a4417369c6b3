#pragma once

#include "irrsde/brownian.hpp"
#include "irrsde/coefficients.hpp"
#include "irrsde/config.hpp"
#include "irrsde/diagnostics.hpp"
#include "irrsde/error_stats.hpp"
#include "irrsde/euler_maruyama.hpp"
#include "irrsde/gallery.hpp"
#include "irrsde/harness.hpp"
#include "irrsde/interpolation.hpp"
#include "irrsde/parallel.hpp"
#include "irrsde/quadrature.hpp"
#include "irrsde/regularity.hpp"
#include "irrsde/rng.hpp"
#include "irrsde/selftest.hpp"
#include "irrsde/transform.hpp"
#include "irrsde/yamada_watanabe.hpp"
