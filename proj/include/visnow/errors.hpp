#pragma once

#include <stdexcept>
#include <string>

namespace visnow {

// Problems with the input data: malformed reports, degenerate datasets,
// corrupt files. The CLI maps these to exit status 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VISNOW_DATA_ERROR(Name)                                              \
    class Name : public DataError {                                          \
    public:                                                                  \
        explicit Name(const std::string& what) : DataError(#Name ": " + what) {} \
    }

// metar / taf
VISNOW_DATA_ERROR(MalformedReport);
VISNOW_DATA_ERROR(UnparseableVisibility);
VISNOW_DATA_ERROR(MalformedBulletin);
VISNOW_DATA_ERROR(UnresolvableGroupTime);

// series / features
VISNOW_DATA_ERROR(MixedStations);
VISNOW_DATA_ERROR(EmptySeries);
VISNOW_DATA_ERROR(TooFewExamples);

// gbdt / explain
VISNOW_DATA_ERROR(SingleClass);
VISNOW_DATA_ERROR(NonFiniteFeature);
VISNOW_DATA_ERROR(DimensionMismatch);
VISNOW_DATA_ERROR(FormatVersionMismatch);
VISNOW_DATA_ERROR(CorruptModel);
VISNOW_DATA_ERROR(EmptyBackground);
VISNOW_DATA_ERROR(EmptyDataset);

// bench
VISNOW_DATA_ERROR(LengthMismatch);
VISNOW_DATA_ERROR(EmptyInput);
VISNOW_DATA_ERROR(NoPositiveTruth);
VISNOW_DATA_ERROR(NoPositivePred);
VISNOW_DATA_ERROR(NoOverlap);
VISNOW_DATA_ERROR(HorizonMismatch);
VISNOW_DATA_ERROR(UnknownGroup);

// ingest
VISNOW_DATA_ERROR(ExhaustedRetries);
VISNOW_DATA_ERROR(CacheCorrupt);

#undef VISNOW_DATA_ERROR

} // namespace visnow
