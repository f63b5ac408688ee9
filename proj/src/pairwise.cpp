#include "fdeval/pairwise.hpp"

#include "fdeval/numeric.hpp"
#include "fdeval/segmetrics.hpp"

namespace fdeval {

double pairwise_dsc(const std::vector<LabelMap>& samples) {
    if (samples.size() < 2) {
        throw EvalError(ErrorCode::TooFewSamples, "pairwise DSC needs at least 2 samples");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
        validate_pair(samples[i], samples[0]);
    }
    // fixed (i, j) order keeps the accumulation bit-reproducible
    KahanSum acc;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            acc.add(mean_dsc(samples[i], samples[j]));
            ++pairs;
        }
    }
    return acc.value() / static_cast<double>(pairs);
}

}  // namespace fdeval
