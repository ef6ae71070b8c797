#pragma once

#include "modliar/bundled.hpp"
#include "modliar/formula.hpp"
#include "modliar/kripke.hpp"
#include "modliar/model_io.hpp"
#include "modliar/oracle.hpp"
#include "modliar/proof.hpp"
#include "modliar/syntax.hpp"
#include "modliar/tableau.hpp"
