#pragma once

#include "warpalign/core.hpp"
#include "warpalign/warpmap.hpp"
#include "warpalign/warpdist.hpp"
#include "warpalign/srvf.hpp"
#include "warpalign/shapeops.hpp"
#include "warpalign/align_dp.hpp"
#include "warpalign/align_sa.hpp"
#include "warpalign/align_bayes.hpp"
#include "warpalign/landmarks.hpp"
#include "warpalign/fixtures.hpp"
