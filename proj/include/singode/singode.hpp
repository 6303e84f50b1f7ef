// Umbrella header.
#pragma once

#include "singode/block_reduction.hpp"
#include "singode/decompose.hpp"
#include "singode/errors.hpp"
#include "singode/fd.hpp"
#include "singode/hypotheses.hpp"
#include "singode/integrate.hpp"
#include "singode/manifolds.hpp"
#include "singode/named_systems.hpp"
#include "singode/navier_stokes.hpp"
#include "singode/poly.hpp"
#include "singode/rescale.hpp"
#include "singode/spectral.hpp"
#include "singode/stable.hpp"
#include "singode/system.hpp"
#include "singode/trajectory.hpp"
