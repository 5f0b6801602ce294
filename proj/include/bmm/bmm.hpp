#pragma once

#include "bmm/align.hpp"
#include "bmm/assignment.hpp"
#include "bmm/config.hpp"
#include "bmm/datagen.hpp"
#include "bmm/encode.hpp"
#include "bmm/error.hpp"
#include "bmm/eval.hpp"
#include "bmm/match.hpp"
#include "bmm/melody.hpp"
#include "bmm/midi.hpp"
#include "bmm/ngram.hpp"
#include "bmm/notelist.hpp"
#include "bmm/parallel.hpp"
#include "bmm/rng.hpp"
