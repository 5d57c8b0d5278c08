// Umbrella header.
#pragma once

#include "tabstruct/core.hpp"
#include "tabstruct/rng.hpp"
#include "tabstruct/gt_prep.hpp"
#include "tabstruct/align_loss.hpp"
#include "tabstruct/structure.hpp"
#include "tabstruct/eval_phys.hpp"
#include "tabstruct/eval_logical.hpp"
#include "tabstruct/synth.hpp"
#include "tabstruct/io.hpp"
