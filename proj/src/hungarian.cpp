#include "strokefit/hungarian.hpp"

namespace strokefit {

template BasicAssignment<double> hungarian<double>(const CostMatrix<double>&);

}  // namespace strokefit
