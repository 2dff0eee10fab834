#include "levyfp/identities.hpp"
