//! Explicit-state model checking for priced resource-bounded
//! alternating-time temporal logic, with a linearly bounded alternating
//! Turing machine simulator and two compilers from machine acceptance to
//! model checking instances.

pub mod checker;
pub mod exec;
pub mod formula;
pub mod gen;
pub mod lbatm;
pub mod model;
pub mod reduction;

pub use checker::{check, label, oracle_check, witness, CheckError, Checker, Labeling};
pub use exec::ExecPolicy;
pub use formula::{parse_formula, Formula, Signature};
pub use model::{Amount, Availability, Configuration, MoneyVector, PricedGameStructure, ResourceDelta};
