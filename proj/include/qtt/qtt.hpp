#pragma once
/// @file qtt.hpp
/// @brief Umbrella header.

#include "qtt/analysis.hpp"
#include "qtt/complexity.hpp"
#include "qtt/encoders.hpp"
#include "qtt/interpolation.hpp"
#include "qtt/io.hpp"
#include "qtt/piecewise.hpp"
#include "qtt/poly_basis.hpp"
#include "qtt/quadrature.hpp"
#include "qtt/targets.hpp"
#include "qtt/tensor_train.hpp"
#include "qtt/tensorization.hpp"
