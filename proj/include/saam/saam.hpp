#pragma once

#include "saam/errors.hpp"
#include "saam/rng.hpp"

#include "saam/autodiff/grad_check.hpp"
#include "saam/autodiff/ops.hpp"
#include "saam/autodiff/parameters.hpp"
#include "saam/autodiff/tensor.hpp"

#include "saam/text/batch.hpp"
#include "saam/text/corpus_io.hpp"
#include "saam/text/document.hpp"
#include "saam/text/keyword_labels.hpp"
#include "saam/text/split.hpp"
#include "saam/text/synthetic.hpp"
#include "saam/text/tokenizer.hpp"
#include "saam/text/vocabulary.hpp"

#include "saam/model/encoders.hpp"
#include "saam/model/heads.hpp"
#include "saam/model/model.hpp"
#include "saam/model/predictions.hpp"

#include "saam/training/checkpoint.hpp"
#include "saam/training/losses.hpp"
#include "saam/training/optimizer.hpp"
#include "saam/training/trainer.hpp"

#include "saam/evaluation/evaluate.hpp"
#include "saam/evaluation/metrics.hpp"

#include "saam/attribution/snippets.hpp"

#include "saam/selftest.hpp"
