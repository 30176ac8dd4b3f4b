#pragma once

#include <string>

#include "xmrsa/errors.hpp"
#include "xmrsa/mat.hpp"

namespace xmrsa {

// Three pairwise Spearman RSA values among acoustics, EEG and a model
// layer, plus their tri-modal neighborhood consistency score.
struct TriModalResult {
    double rho_ac_eeg = 0.0;
    double rho_eeg_llm = 0.0;
    double rho_ac_llm = 0.0;
    double tnc = 0.0;
    std::size_t layer = 0;
    std::string sentence;
    bool complete = true;  // false when a pairwise RSA failed
};

// Mean of the three squared correlations; in [0,1] for inputs in [-1,1].
double tnc_from_rhos(double r1, double r2, double r3);

// Same value through the tri-modal correlation matrix route
// (||R||_F^2 - 3) / 6; agrees with tnc_from_rhos to machine precision.
double tnc_frobenius_check(double r1, double r2, double r3);

// Builds the three correlation-distance RDMs, computes pairwise Spearman
// RSA, and combines them. All three matrices must share the same row count.
// A failed pair leaves its rho as NaN, marks the result incomplete, and
// computes TNC from the remaining pairs only if all three succeeded.
TriModalResult tnc_sentence(const Mat& ac, const Mat& eeg, const Mat& llm,
                            Warnings* warnings = nullptr);

}  // namespace xmrsa
