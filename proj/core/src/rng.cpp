#include "levyfp/rng.hpp"
#include "levyfp/parallel.hpp"
