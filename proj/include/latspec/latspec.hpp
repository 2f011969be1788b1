// Umbrella header for the lattice-spectra library.
#pragma once

#include "latspec/canonical.hpp"
#include "latspec/csv.hpp"
#include "latspec/empirics.hpp"
#include "latspec/errors.hpp"
#include "latspec/lattice.hpp"
#include "latspec/parallel.hpp"
#include "latspec/percolation.hpp"
#include "latspec/rng.hpp"
#include "latspec/stieltjes.hpp"
