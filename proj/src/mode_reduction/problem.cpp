// Problem is implemented alongside ModeOperator; this unit keeps grid helpers
// that depend on both the model and the grid.
#include "ends/mode_reduction.hpp"
