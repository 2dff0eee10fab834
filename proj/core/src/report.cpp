#include "levyfp/report.hpp"
