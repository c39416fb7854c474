//! Genus-one CM laboratory: class groups, singular moduli, Faltings and
//! theta heights, and the scans comparing them.

pub mod classpoly;
pub mod forms;
pub mod lab;
pub mod modular;

pub use classpoly::{hilbert_class_poly, j_height, ClassPolynomial};
pub use forms::{class_number, fundamental_discriminants, is_fundamental, reduced_forms, Discriminant, ReducedForm};
pub use lab::{
    cm_record, faltings_height_cm, finiteness_demo, scan, theta_faltings_residual, theta_height_estimate, verify_decay,
    verify_theta_faltings, CMRecord, DecayReport, FaltingsOffset, FinitenessCensus, RecordOptions, TfReport,
};
pub use modular::{delta, faltings_local_term, j_invariant, reduce_to_fundamental_domain, theta_null};
