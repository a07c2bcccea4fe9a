#pragma once

// Umbrella header: undersampled-Fourier simulation, the classical
// Chambolle-Pock solver, the unrolled learned variant with reverse-mode
// gradients, synthetic training, and image-quality metrics.

#include "cpmri/adam.hpp"
#include "cpmri/cp_solver.hpp"
#include "cpmri/cpnet.hpp"
#include "cpmri/dataset.hpp"
#include "cpmri/encoding.hpp"
#include "cpmri/errors.hpp"
#include "cpmri/field.hpp"
#include "cpmri/fourier.hpp"
#include "cpmri/gradcheck.hpp"
#include "cpmri/haar.hpp"
#include "cpmri/io.hpp"
#include "cpmri/manifest.hpp"
#include "cpmri/mask.hpp"
#include "cpmri/metrics.hpp"
#include "cpmri/phantom.hpp"
#include "cpmri/prox.hpp"
#include "cpmri/tape.hpp"
#include "cpmri/tensor.hpp"
#include "cpmri/train.hpp"
#include "cpmri/transforms.hpp"
#include "cpmri/version.hpp"
