#include "xmrsa/tnc.hpp"

#include <cmath>
#include <limits>

#include "xmrsa/metrics.hpp"
#include "xmrsa/rdm.hpp"

namespace xmrsa {

namespace {

void check_range(double r, const char* name) {
    if (!(r >= -1.0 && r <= 1.0))
        throw OutOfRange(std::string(name) + " must lie in [-1,1]");
}

}  // namespace

double tnc_from_rhos(double r1, double r2, double r3) {
    check_range(r1, "r1");
    check_range(r2, "r2");
    check_range(r3, "r3");
    return (r1 * r1 + r2 * r2 + r3 * r3) / 3.0;
}

double tnc_frobenius_check(double r1, double r2, double r3) {
    check_range(r1, "r1");
    check_range(r2, "r2");
    check_range(r3, "r3");
    // ||R||_F^2 of the symmetric 3x3 correlation matrix with unit diagonal
    const double frob2 =
        3.0 + 2.0 * (r1 * r1) + 2.0 * (r2 * r2) + 2.0 * (r3 * r3);
    return (frob2 - 3.0) / 6.0;
}

TriModalResult tnc_sentence(const Mat& ac, const Mat& eeg, const Mat& llm,
                            Warnings* warnings) {
    if (ac.rows != eeg.rows || eeg.rows != llm.rows)
        throw ShapeMismatch("<tnc_sentence rows>", ac.rows, eeg.rows);

    const RdmVec r_ac = vec_upper(build_rdm(ac, warnings));
    const RdmVec r_eeg = vec_upper(build_rdm(eeg, warnings));
    const RdmVec r_llm = vec_upper(build_rdm(llm, warnings));

    TriModalResult out;
    auto pair_rho = [&](const RdmVec& a, const RdmVec& b,
                        const char* label) -> double {
        try {
            return spearman_rsa(a, b).value;
        } catch (const Error& e) {
            warn(warnings, std::string("tnc_sentence: ") + label +
                               " failed: " + e.what());
            out.complete = false;
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    out.rho_ac_eeg = pair_rho(r_ac, r_eeg, "ac-eeg");
    out.rho_eeg_llm = pair_rho(r_eeg, r_llm, "eeg-llm");
    out.rho_ac_llm = pair_rho(r_ac, r_llm, "ac-llm");
    out.tnc = out.complete ? tnc_from_rhos(out.rho_ac_eeg, out.rho_eeg_llm,
                                           out.rho_ac_llm)
                           : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace xmrsa
