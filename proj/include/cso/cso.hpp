#pragma once

#include "cso/errors.hpp"
#include "cso/rational.hpp"
#include "cso/weightgen.hpp"
#include "cso/conjugation.hpp"
#include "cso/shiftcore.hpp"
#include "cso/approxkak.hpp"
#include "cso/certificate_json.hpp"
#include "cso/sstdemo.hpp"
#include "cso/matrix_io.hpp"
#include "cso/csofit.hpp"
