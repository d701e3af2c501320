#include <catch2/catch_amalgamated.hpp>
#include "sle/sle.hpp"
