// Typed error hierarchy. Every failure mode that callers are expected to
// handle programmatically gets its own type; the code() string is stable and
// appears verbatim in CLI diagnostics.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ichaos {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct CoincidentPoints : Error {
    explicit CoincidentPoints(const std::string& w) : Error("CoincidentPoints", w) {}
};

struct OutOfDomain : Error {
    explicit OutOfDomain(const std::string& w) : Error("OutOfDomain", w) {}
};

struct BadCutoff : Error {
    explicit BadCutoff(const std::string& w) : Error("BadCutoff", w) {}
};

struct EmbeddingNotPSD : Error {
    EmbeddingNotPSD(double worst, const std::string& w)
        : Error("EmbeddingNotPSD", w), worst_eigenvalue(worst) {}
    double worst_eigenvalue;
};

struct SolverDiverged : Error {
    SolverDiverged(double residual, const std::string& w)
        : Error("SolverDiverged", w), residual(residual) {}
    double residual;
};

struct BadModes : Error {
    explicit BadModes(const std::string& w) : Error("BadModes", w) {}
};

struct EpsTooSmall : Error {
    explicit EpsTooSmall(const std::string& w) : Error("EpsTooSmall", w) {}
};

struct DiscOutsideDomain : Error {
    explicit DiscOutsideDomain(const std::string& w) : Error("DiscOutsideDomain", w) {}
};

struct QueryTooSmall : Error {
    explicit QueryTooSmall(const std::string& w) : Error("QueryTooSmall", w) {}
};

struct QueryOutsideFootprint : Error {
    explicit QueryOutsideFootprint(const std::string& w)
        : Error("QueryOutsideFootprint", w) {}
};

struct BetaOutOfRange : Error {
    explicit BetaOutOfRange(const std::string& w) : Error("BetaOutOfRange", w) {}
};

struct TooFewReplicas : Error {
    explicit TooFewReplicas(const std::string& w) : Error("TooFewReplicas", w) {}
};

struct BadOrder : Error {
    explicit BadOrder(const std::string& w) : Error("BadOrder", w) {}
};

struct LadderTooShort : Error {
    explicit LadderTooShort(const std::string& w) : Error("LadderTooShort", w) {}
};

struct RadiusTooLarge : Error {
    explicit RadiusTooLarge(const std::string& w) : Error("RadiusTooLarge", w) {}
};

struct ResolutionExceeded : Error {
    explicit ResolutionExceeded(const std::string& w) : Error("ResolutionExceeded", w) {}
};

struct DegenerateCounts : Error {
    explicit DegenerateCounts(const std::string& w) : Error("DegenerateCounts", w) {}
};

struct AlphaOutOfRange : Error {
    explicit AlphaOutOfRange(const std::string& w) : Error("AlphaOutOfRange", w) {}
};

struct TooFewMoments : Error {
    explicit TooFewMoments(const std::string& w) : Error("TooFewMoments", w) {}
};

struct TooFewSamples : Error {
    explicit TooFewSamples(const std::string& w) : Error("TooFewSamples", w) {}
};

struct DepthExceedsResolution : Error {
    explicit DepthExceedsResolution(const std::string& w)
        : Error("DepthExceedsResolution", w) {}
};

struct EmptyPyramid : Error {
    explicit EmptyPyramid(const std::string& w) : Error("EmptyPyramid", w) {}
};

struct TooShallow : Error {
    explicit TooShallow(const std::string& w) : Error("TooShallow", w) {}
};

struct FootprintTooSmall : Error {
    explicit FootprintTooSmall(const std::string& w) : Error("FootprintTooSmall", w) {}
};

struct BadNesting : Error {
    explicit BadNesting(const std::string& w) : Error("BadNesting", w) {}
};

struct BadScales : Error {
    explicit BadScales(const std::string& w) : Error("BadScales", w) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& w) : Error("ShapeMismatch", w) {}
};

struct OrderTooHigh : Error {
    explicit OrderTooHigh(const std::string& w) : Error("OrderTooHigh", w) {}
};

struct NegativeIntegral : Error {
    explicit NegativeIntegral(const std::string& w) : Error("NegativeIntegral", w) {}
};

struct Degenerate : Error {
    explicit Degenerate(const std::string& w) : Error("Degenerate", w) {}
};

struct NotApplicable : Error {
    explicit NotApplicable(const std::string& w) : Error("NotApplicable", w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error("IoError", w) {}
};

struct ParseError : Error {
    ParseError(int line, const std::string& w)
        : Error("ParseError", "line " + std::to_string(line) + ": " + w), line(line) {}
    int line;
};

// Config validation collects every violation before reporting.
struct ValidationError : Error {
    ValidationError(std::vector<std::string> fields, const std::string& w)
        : Error("ValidationError", w), fields(std::move(fields)) {}
    std::vector<std::string> fields;
};

struct Precondition : Error {
    explicit Precondition(const std::string& w) : Error("Precondition", w) {}
};

}  // namespace ichaos
