#pragma once

#include <stdexcept>
#include <string>

namespace valprod
{
//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

#define VALPROD_DECLARE_ERROR(NAME)       \
    class NAME : public Error             \
    {                                     \
      public:                             \
        using Error::Error;               \
    }

VALPROD_DECLARE_ERROR(ChartMismatch);
VALPROD_DECLARE_ERROR(DomainError);
VALPROD_DECLARE_ERROR(DegreeError);
VALPROD_DECLARE_ERROR(QuadratureBudgetExceeded);
VALPROD_DECLARE_ERROR(ContactDegeneracy);
VALPROD_DECLARE_ERROR(DegenerateBody);
VALPROD_DECLARE_ERROR(InvalidBody);
VALPROD_DECLARE_ERROR(NotTransversal);
VALPROD_DECLARE_ERROR(AntipodalSingularity);
VALPROD_DECLARE_ERROR(AntipodalCrossing);
VALPROD_DECLARE_ERROR(OracleConditioning);
VALPROD_DECLARE_ERROR(ProductUnavailable);
VALPROD_DECLARE_ERROR(SamplingDegeneracy);
VALPROD_DECLARE_ERROR(FitConditioning);
VALPROD_DECLARE_ERROR(PairingSingular);
VALPROD_DECLARE_ERROR(ParseError);
VALPROD_DECLARE_ERROR(Unsupported);

#undef VALPROD_DECLARE_ERROR

}  // namespace valprod
