#pragma once

#include "pathlab/core/convolve.hpp"
#include "pathlab/core/error.hpp"
#include "pathlab/core/fft.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/core/rng.hpp"
#include "pathlab/core/window.hpp"
#include "pathlab/potentials.hpp"
#include "pathlab/feynman/propagator.hpp"
#include "pathlab/schrodinger/split_step.hpp"
#include "pathlab/diffusion/walk.hpp"
#include "pathlab/huygens/wave.hpp"
#include "pathlab/pairpath/quasiprob.hpp"
#include "pathlab/born/scattering.hpp"
