#ifndef COREXTM_COREX_REFERENCE_HPP_
#define COREXTM_COREX_REFERENCE_HPP_

#include "corextm/corex.hpp"

// Serial dense implementation of the same fitting procedure. Every document is
// scored by summing over the full vocabulary, with no absent/present
// decomposition and no OpenMP. Kept for cross-checking the parallel kernels
// and as the baseline in the benchmark. Consumes the RNG in the same order as
// corextm::fit, so the two agree to rounding error.

namespace corextm::reference {

CorexModel fit(const DocTermMatrix& matrix, const Vocabulary& vocab, const SeedSet& seeds,
               const FitOptions& options);

kernels::EStepResult estep(const CorexModel& model, const DocTermMatrix& matrix,
                           const std::vector<uint32_t>& docs);

SoftCounts accumulate(const DocTermMatrix& matrix, const std::vector<uint32_t>& docs,
                      const std::vector<double>& q1, size_t n_topics);

}  // namespace corextm::reference

#endif  // COREXTM_COREX_REFERENCE_HPP_
