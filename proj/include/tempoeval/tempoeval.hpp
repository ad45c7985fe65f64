#pragma once

#include "tempoeval/closure.hpp"
#include "tempoeval/core.hpp"
#include "tempoeval/merging.hpp"
#include "tempoeval/report.hpp"
#include "tempoeval/scoring.hpp"
#include "tempoeval/stats.hpp"
#include "tempoeval/timeml.hpp"
#include "tempoeval/xml.hpp"
