#pragma once

#include "mfqp/numerics/random.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace mfqp {

//! Square roots of the eigenvalues of the circulant matrix whose first row
//! embeds the stationary covariance c(0..m/2). m is the smallest power of two
//! >= 2(n-1), doubled (up to max_doublings times) while the spectrum has a
//! materially negative eigenvalue. Throws Error(embedding_failure) when
//! doubling does not help.
struct CirculantEmbedding
{
  std::size_t n = 0; //!< requested sample length
  std::size_t m = 0; //!< embedding length
  std::vector<double> sqrt_eigenvalues;
};

CirculantEmbedding embed_covariance(const std::function<double(std::size_t)>& cov,
                                    std::size_t n,
                                    unsigned max_doublings = 4);

//! Exact stationary Gaussian sample of length emb.n with the embedded
//! covariance: first n entries of F^-1 diag(sqrt ev) F w, w white of length m.
std::vector<double> sample_circulant(const CirculantEmbedding& emb,
                                     const RandomStream& rs);

} // namespace mfqp
