#ifndef GARCHMOM_GARCHMOM_HPP
#define GARCHMOM_GARCHMOM_HPP

#include "garchmom/common.hpp"
#include "garchmom/density.hpp"
#include "garchmom/estimate.hpp"
#include "garchmom/gof.hpp"
#include "garchmom/ingest.hpp"
#include "garchmom/innovation.hpp"
#include "garchmom/limits.hpp"
#include "garchmom/model.hpp"
#include "garchmom/moments_aggregated.hpp"
#include "garchmom/moments_forward.hpp"
#include "garchmom/quadrature.hpp"
#include "garchmom/rng.hpp"
#include "garchmom/simulate.hpp"

#endif  // GARCHMOM_GARCHMOM_HPP
