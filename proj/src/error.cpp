#include "swarmlab/error.hpp"
