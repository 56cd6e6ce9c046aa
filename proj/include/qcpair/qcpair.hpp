/**
 * @file qcpair.hpp
 * @brief Everything at once.
 */
#pragma once

#include "qcpair/cli.hpp"
#include "qcpair/dilatation.hpp"
#include "qcpair/distortion.hpp"
#include "qcpair/error.hpp"
#include "qcpair/extensions.hpp"
#include "qcpair/geom.hpp"
#include "qcpair/io.hpp"
#include "qcpair/metric.hpp"
#include "qcpair/plmap.hpp"
#include "qcpair/scenarios.hpp"
