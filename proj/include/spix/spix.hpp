#ifndef SPIX_SPIX_HPP
#define SPIX_SPIX_HPP

#include "spix/config.hpp"
#include "spix/dataset.hpp"
#include "spix/error.hpp"
#include "spix/image.hpp"
#include "spix/labels.hpp"
#include "spix/metrics.hpp"
#include "spix/nn.hpp"
#include "spix/nn_io.hpp"
#include "spix/pnm_io.hpp"
#include "spix/scattering.hpp"
#include "spix/slic.hpp"
#include "spix/tensor_io.hpp"
#include "spix/trainpix.hpp"

#endif  // SPIX_SPIX_HPP
