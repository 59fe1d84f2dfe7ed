#include "trajgan/optim.hpp"

namespace trajgan::nn {

template class Adam<float>;
template class Adam<double>;

}  // namespace trajgan::nn
