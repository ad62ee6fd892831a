//! Certifying and refuting firmness.
//!
//! A map is firm when there are coefficients `q, r, s, t >= 0` with
//! `inf t > 0`, `sup (q + r + s + 2t) <= 1` and, for every pair,
//!
//! ```text
//! delta(Tx, Ty) <= q delta(x, y) + r delta(x, Tx) + s delta(y, Ty)
//!                  + t [delta(x, Ty) + delta(Tx, y)]
//! ```
//!
//! Everything here works on samples: a passing report certifies the sampled
//! region only.

mod certify;
mod coefficients;
mod firmly;
mod proposition;
mod tau;

pub use certify::{
    certify_firm_constant, certify_firm_constant_grid, certify_report, CertificateOutcome, CertifyReport,
    ConstantCertificate, GRID_RESOLUTION,
};
pub use coefficients::{
    check_condition_c, check_condition_c_on, check_conditions_ab, lambda_to_coeffs, AbReport, Coefficient,
    Coefficients, ConditionCReport,
};
pub use firmly::{check_firmly_nonexpansive, default_lambda_grid, FirmlyNonexpansiveReport, LambdaVerdict};
pub use proposition::{proposition_witness_scan, Witness};
pub use tau::{
    tau, tau_infimum_scan, tau_record, TauRecord, TauScanOptions, TauScanReport, TauVerdict, DEFAULT_EPS_DEN,
    DEFAULT_TAU_THRESHOLD,
};
