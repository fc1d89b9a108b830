//! Jordan–Wigner mapping: `a†_p = ½(X_p − iY_p) Z_{<p}`, `a_p = ½(X_p + iY_p) Z_{<p}`.

use num_complex::Complex64;

use crate::fermion::{FermionKey, FermionOperator};
use crate::pauli::{PauliKey, PauliOperator};
use crate::ZERO_FLOOR;

/// Image of a single ladder operator.
pub fn ladder(mode: usize, dagger: bool) -> PauliOperator {
    let string = (1u64 << mode) - 1;
    let b = 1u64 << mode;
    let mut op = PauliOperator::new();
    op.add_term(PauliKey::new(b, string), Complex64::new(0.5, 0.0));
    let y = if dagger { -0.5 } else { 0.5 };
    op.add_term(PauliKey::new(b, string | b), Complex64::new(0.0, y));
    op
}

/// Image of one canonical term `a†_{p1}…a†_{pn} a_{qn}…a_{q1}`.
pub fn term(key: &FermionKey) -> PauliOperator {
    let mut op = PauliOperator::identity(1.0);
    for p in key.creations() {
        op = op.multiply(&ladder(p, true));
    }
    for q in key.annihilations().into_iter().rev() {
        op = op.multiply(&ladder(q, false));
    }
    op
}

pub fn jordan_wigner(op: &FermionOperator) -> PauliOperator {
    let mut out = PauliOperator::identity(op.constant());
    for (k, c) in op.iter() {
        out = out.add_scaled(&term(k), Complex64::new(*c, 0.0));
    }
    out.prune(ZERO_FLOOR);
    out
}
