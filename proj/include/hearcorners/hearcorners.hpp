#pragma once

#include "hearcorners/errors.hpp"
#include "hearcorners/text_io.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/domain_io.hpp"
#include "hearcorners/spectrum.hpp"
#include "hearcorners/bessel.hpp"
#include "hearcorners/analytic_spectra.hpp"
#include "hearcorners/mesh.hpp"
#include "hearcorners/fem.hpp"
#include "hearcorners/heat_trace.hpp"
#include "hearcorners/asymptotic_fit.hpp"
#include "hearcorners/classifier.hpp"
#include "hearcorners/report.hpp"
#include "hearcorners/corpus.hpp"
