// spincavity.hpp — umbrella header for the molecular-spin-qudit workbench.

#pragma once

#include "spincavity/constants.hpp"
#include "spincavity/errors.hpp"
#include "spincavity/linalg.hpp"
#include "spincavity/spin.hpp"
#include "spincavity/coupling.hpp"
#include "spincavity/effective.hpp"
#include "spincavity/resonance.hpp"
#include "spincavity/dynamics.hpp"
#include "spincavity/qubit_oracle.hpp"
