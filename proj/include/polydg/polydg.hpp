#pragma once

// Umbrella header.
#include <polydg/geometry.hpp>
#include <polydg/mesh.hpp>
#include <polydg/mesh_generators.hpp>
#include <polydg/mesh_io.hpp>
#include <polydg/quadrature.hpp>
#include <polydg/basis.hpp>
#include <polydg/method_config.hpp>
#include <polydg/local_ops.hpp>
#include <polydg/sparse.hpp>
#include <polydg/assembly.hpp>
#include <polydg/definitional.hpp>
#include <polydg/manufactured.hpp>
#include <polydg/solve.hpp>
#include <polydg/analysis.hpp>
#include <polydg/config.hpp>
#include <polydg/studies.hpp>
