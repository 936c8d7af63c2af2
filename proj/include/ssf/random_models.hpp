#pragma once

// Seeded random instances for property checks, tests and benchmarks.

#include <random>
#include <vector>

#include "ssf/engine.hpp"
#include "ssf/linalg.hpp"
#include "ssf/models.hpp"

namespace ssf::random {

using Rng = std::mt19937_64;

enum class Signature { Positive, Negative, Mixed };

linalg::Matrix gaussian(linalg::Index rows, linalg::Index cols, Rng& rng);
linalg::HermitianMatrix hermitian(linalg::Index n, Rng& rng, double scale = 1.0);
linalg::Matrix unitary(linalg::Index n, Rng& rng);
linalg::ProjectionMatrix projection(linalg::Index n, linalg::Index rank, Rng& rng);

/// Invertible J with |eigenvalues| in [0.5, 2]; Mixed has at least one of each sign when r > 1.
linalg::HermitianMatrix coupling(linalg::Index r, Signature sig, Rng& rng);

std::shared_ptr<models::DenseModel> dense_model(linalg::Index n, linalg::Index r, Signature sig, Rng& rng,
                                                double g_scale = 0.7);

/// Sites 1..r (shuffled, distinct), weights scaled by w_scale.
std::shared_ptr<models::HalfLineLaplacianModel> lattice_model(linalg::Index r, Signature sig, Rng& rng,
                                                              double w_scale = 0.8);

/// Midpoints of the gaps of sigma(H0) u sigma(H) wider than min_width, plus
/// one point below and one above.
std::vector<double> gap_points(const models::DenseModel& m, double min_width = 1e-3);

/// Random (A, B, J) with B >= 0 of the given rank.
engine::BoundaryData boundary_data(linalg::Index r, linalg::Index b_rank, Rng& rng);

}  // namespace ssf::random
