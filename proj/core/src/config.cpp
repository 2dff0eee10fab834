#include "levyfp/config.hpp"
