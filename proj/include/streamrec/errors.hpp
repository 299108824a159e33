#pragma once

#include <stdexcept>
#include <string>

namespace streamrec {

/// Base class for every recoverable numerical or data error raised by the library.
/// Precondition violations (bad arguments) are reported as std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STREAMREC_DEFINE_ERROR(Name)        \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// linalg
STREAMREC_DEFINE_ERROR(NotPositiveDefinite);
STREAMREC_DEFINE_ERROR(NoConvergence);
// basis
STREAMREC_DEFINE_ERROR(GridTooCoarse);
// measurement
STREAMREC_DEFINE_ERROR(UnsortedStream);
STREAMREC_DEFINE_ERROR(KernelTooLong);
// stream_solver
STREAMREC_DEFINE_ERROR(SingularTail);
STREAMREC_DEFINE_ERROR(SingularBlock);
STREAMREC_DEFINE_ERROR(NonContiguousBatch);
STREAMREC_DEFINE_ERROR(HistoryTruncated);
// oracle
STREAMREC_DEFINE_ERROR(SingularSystem);
// analysis
STREAMREC_DEFINE_ERROR(OutOfRegime);

#undef STREAMREC_DEFINE_ERROR

}  // namespace streamrec
