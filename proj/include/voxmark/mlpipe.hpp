#ifndef VOXMARK_MLPIPE_HPP
#define VOXMARK_MLPIPE_HPP

#include "voxmark/mlpipe/cv.hpp"
#include "voxmark/mlpipe/decompose.hpp"
#include "voxmark/mlpipe/models.hpp"
#include "voxmark/mlpipe/preprocess.hpp"
#include "voxmark/mlpipe/select.hpp"
#include "voxmark/mlpipe/table.hpp"
#include "voxmark/mlpipe/viz.hpp"

#endif
