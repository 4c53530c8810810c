//! The partial action of `F_n` on `X = {1..n}^∞` behind the Cuntz algebra `O_n`:
//! `θ_g: X_b → X_a`, `bμ ↦ aμ` for `g = ab⁻¹`, with `D_g = C(X_a)` and zero domains for
//! elements not of that form.

pub mod cuntz;
pub mod cylinder;
pub mod groupoid;
pub mod symbol;

pub use cuntz::{
    cuntz_defect_bruteforce, cuntz_defect_fast, cuntz_predicted, validate_cylinder_action, xi_witness, CuntzFamily,
    CuntzWitness,
};
pub use cylinder::CylFun;
pub use groupoid::{spectral_groupoid, Arrow, GroupoidTable};
pub use symbol::{theta_apply, PartialSymbol};
