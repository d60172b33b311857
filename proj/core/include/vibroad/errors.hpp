#pragma once

#include <stdexcept>
#include <string>

namespace vibroad {

// Base for all library errors. `code()` is a stable machine-parseable
// identifier; the CLI prints it as the first token of its error line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define VIBROAD_DEFINE_ERROR(Name)                         \
    class Name : public Error {                            \
    public:                                                \
        explicit Name(const std::string& what)             \
            : Error(#Name, what) {}                        \
    }

VIBROAD_DEFINE_ERROR(InvalidSignal);
VIBROAD_DEFINE_ERROR(InvalidBand);
VIBROAD_DEFINE_ERROR(InvalidSpec);
VIBROAD_DEFINE_ERROR(DegenerateSignal);
VIBROAD_DEFINE_ERROR(InsufficientData);
VIBROAD_DEFINE_ERROR(SingularCovariance);
VIBROAD_DEFINE_ERROR(InvalidContamination);
VIBROAD_DEFINE_ERROR(EmptyEnsemble);
VIBROAD_DEFINE_ERROR(DegenerateGeometry);
VIBROAD_DEFINE_ERROR(InvalidConfig);
VIBROAD_DEFINE_ERROR(WrongAlgorithm);
VIBROAD_DEFINE_ERROR(IncomparableRankings);
VIBROAD_DEFINE_ERROR(NoSpecificFeatures);
VIBROAD_DEFINE_ERROR(NoInputs);
VIBROAD_DEFINE_ERROR(IoError);

#undef VIBROAD_DEFINE_ERROR

} // namespace vibroad
