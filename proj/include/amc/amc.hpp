// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amc/core/binio.hpp"
#include "amc/core/error.hpp"
#include "amc/core/rng.hpp"
#include "amc/core/tensor.hpp"
#include "amc/core/threading.hpp"
#include "amc/dsp/fft.hpp"
#include "amc/models/executor.hpp"
#include "amc/models/model.hpp"
#include "amc/models/model_spec.hpp"
#include "amc/nn/activations.hpp"
#include "amc/nn/conv.hpp"
#include "amc/nn/dense.hpp"
#include "amc/nn/dropout.hpp"
#include "amc/nn/gradcheck.hpp"
#include "amc/nn/init.hpp"
#include "amc/nn/loss.hpp"
#include "amc/nn/optimizer.hpp"
#include "amc/nn/pool.hpp"
#include "amc/nn/rnn.hpp"
#include "amc/synth/ampphase.hpp"
#include "amc/synth/audio.hpp"
#include "amc/synth/channel.hpp"
#include "amc/synth/dataset.hpp"
#include "amc/synth/modtype.hpp"
#include "amc/synth/modulators.hpp"
#include "amc/synth/rrc.hpp"
#include "amc/train/ablate.hpp"
#include "amc/train/bench.hpp"
#include "amc/train/evaluate.hpp"
#include "amc/train/report.hpp"
#include "amc/train/trainer.hpp"
