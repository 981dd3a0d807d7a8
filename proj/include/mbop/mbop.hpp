#ifndef MBOP_MBOP_HPP
#define MBOP_MBOP_HPP

#include "mbop/field.hpp"
#include "mbop/matrix.hpp"
#include "mbop/matpoly.hpp"
#include "mbop/moments.hpp"
#include "mbop/gaussborel.hpp"
#include "mbop/cdkernel.hpp"
#include "mbop/uvarov.hpp"
#include "mbop/report.hpp"

#endif  // MBOP_MBOP_HPP
