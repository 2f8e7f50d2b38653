#pragma once

#include "ta/core.hpp"
#include "ta/lexer.hpp"
#include "ta/syntax.hpp"
#include "ta/semantics.hpp"
#include "ta/basic.hpp"
#include "ta/calculus.hpp"
#include "ta/tap.hpp"
#include "ta/ccs.hpp"
#include "ta/forcing.hpp"
