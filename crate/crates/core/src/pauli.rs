//! Pauli strings in symplectic (X/Z bitmask) form.
//!
//! Key `(x, z)` denotes `⊗_k P_k` with `(1,0) → X`, `(0,1) → Z`, `(1,1) → Y`,
//! i.e. the string equals `i^{|x∧z|} X^x Z^z`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::ZERO_FLOOR;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliKey {
    pub x: u64,
    pub z: u64,
}

/// Powers of `i`, indexed mod 4.
pub const PHASES: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl PauliKey {
    pub const IDENTITY: PauliKey = PauliKey { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        PauliKey { x, z }
    }

    pub fn single(qubit: usize, letter: char) -> Self {
        let b = 1u64 << qubit;
        match letter {
            'I' => PauliKey::IDENTITY,
            'X' => PauliKey::new(b, 0),
            'Y' => PauliKey::new(b, b),
            'Z' => PauliKey::new(0, b),
            other => panic!("unknown Pauli letter {other}"),
        }
    }

    /// Parses a string such as `"X0 Y1 Z3"`.
    pub fn parse(s: &str) -> Option<Self> {
        let mut key = PauliKey::IDENTITY;
        for tok in s.split_whitespace() {
            let (letter, idx) = tok.split_at(1);
            let q: usize = idx.parse().ok()?;
            let letter = letter.chars().next()?;
            if !matches!(letter, 'X' | 'Y' | 'Z') || q >= 64 {
                return None;
            }
            let single = PauliKey::single(q, letter);
            if key.support() & single.support() != 0 {
                return None;
            }
            key = PauliKey::new(key.x | single.x, key.z | single.z);
        }
        Some(key)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// True iff the symplectic form of the two keys is even.
    pub fn commutes_with(&self, other: &PauliKey) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Product `self · other = i^phase · key`; `phase` is returned mod 4.
    pub fn multiply(&self, other: &PauliKey) -> (PauliKey, u8) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let e = (self.x & self.z).count_ones() + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones();
        let phase = (e + 4 * 64 - (x & z).count_ones()) % 4;
        (PauliKey { x, z }, phase as u8)
    }

    /// `P|det⟩ = phase · |det ^ x⟩`.
    #[inline]
    pub fn apply(&self, det: u64) -> (u64, Complex64) {
        let e = self.y_count() + 2 * (det & self.z).count_ones();
        (det ^ self.x, PHASES[(e % 4) as usize])
    }
}

impl fmt::Display for PauliKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        let mut rest = self.support();
        while rest != 0 {
            let q = rest.trailing_zeros();
            let b = 1u64 << q;
            let letter = match (self.x & b != 0, self.z & b != 0) {
                (true, false) => 'X',
                (true, true) => 'Y',
                _ => 'Z',
            };
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{letter}{q}")?;
            first = false;
            rest &= rest - 1;
        }
        Ok(())
    }
}

/// Complex linear combination of Pauli strings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliOperator {
    terms: BTreeMap<PauliKey, Complex64>,
}

impl PauliOperator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_term(key: PauliKey, coeff: Complex64) -> Self {
        let mut op = Self::new();
        op.add_term(key, coeff);
        op
    }

    pub fn identity(c: f64) -> Self {
        Self::from_term(PauliKey::IDENTITY, Complex64::new(c, 0.0))
    }

    pub fn add_term(&mut self, key: PauliKey, coeff: Complex64) {
        *self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn coefficient(&self, key: &PauliKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    /// Identity coefficient (real part).
    pub fn constant(&self) -> f64 {
        self.coefficient(&PauliKey::IDENTITY).re
    }

    /// Number of stored strings, identity included.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored non-identity strings.
    pub fn non_identity_len(&self) -> usize {
        self.terms.len() - usize::from(self.terms.contains_key(&PauliKey::IDENTITY))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn prune(&mut self, floor: f64) {
        self.terms.retain(|_, c| c.norm() >= floor);
    }

    pub fn retain<F: FnMut(&PauliKey, Complex64) -> bool>(&mut self, mut f: F) {
        self.terms.retain(|k, c| f(k, *c));
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.prune(ZERO_FLOOR);
        out
    }

    pub fn add_scaled(&self, other: &PauliOperator, s: Complex64) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, s * c);
        }
        out.prune(ZERO_FLOOR);
        out
    }

    pub fn multiply(&self, other: &PauliOperator) -> Self {
        let mut out = Self::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let (k, ph) = ka.multiply(kb);
                out.add_term(k, ca * cb * PHASES[ph as usize]);
            }
        }
        out.prune(ZERO_FLOOR);
        out
    }

    pub fn commutator(&self, other: &PauliOperator) -> Self {
        self.multiply(other)
            .add_scaled(&other.multiply(self), Complex64::new(-1.0, 0.0))
    }

    /// Largest imaginary part among coefficients.
    pub fn max_imaginary(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Conjugation `e^{-iθP} H e^{iθP}` applied term by term.
    pub fn conjugate(&self, generator: &PauliGenerator, theta: f64, exec: Execution) -> Self {
        if theta == 0.0 {
            return self.clone();
        }
        let entries: Vec<(PauliKey, Complex64)> = self.terms.iter().map(|(k, c)| (*k, *c)).collect();
        let (s2, c2) = (2.0 * theta).sin_cos();
        let pieces = exec.map(&entries, |&(k, c)| bch_pauli_pair(k, c, generator.key(), s2, c2));
        let mut out = Self::new();
        for piece in pieces {
            for (k, c) in piece.into_iter().flatten() {
                out.add_term(k, c);
            }
        }
        out.prune(ZERO_FLOOR);
        out
    }
}

#[inline]
fn bch_pauli_pair(
    term: PauliKey,
    coeff: Complex64,
    gen: PauliKey,
    s2: f64,
    c2: f64,
) -> [Option<(PauliKey, Complex64)>; 2] {
    if term.commutes_with(&gen) {
        return [Some((term, coeff)), None];
    }
    // anticommuting: (i/2) sin2θ [P_i, P_μ] = i sin2θ P_i P_μ
    let (k, ph) = term.multiply(&gen);
    let rotated = coeff * Complex64::new(0.0, s2) * PHASES[ph as usize];
    [Some((term, coeff * c2)), Some((k, rotated))]
}

/// Closed-form `e^{-iθP_μ} (h·P_i) e^{iθP_μ}`.
pub fn bch_pauli_term(
    term: PauliKey,
    coeff: Complex64,
    generator: &PauliGenerator,
    theta: f64,
) -> PauliOperator {
    let (s2, c2) = (2.0 * theta).sin_cos();
    let mut out = PauliOperator::new();
    for (k, c) in bch_pauli_pair(term, coeff, generator.key(), s2, c2).into_iter().flatten() {
        out.add_term(k, c);
    }
    out.prune(ZERO_FLOOR);
    out
}

/// X on every qubit that differs between two determinants, with the lowest
/// such qubit carrying Y instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliGenerator {
    key: PauliKey,
}

impl PauliGenerator {
    /// `None` when the determinants coincide.
    pub fn between(from: u64, to: u64) -> Option<Self> {
        let diff = from ^ to;
        if diff == 0 {
            return None;
        }
        let y = diff & diff.wrapping_neg();
        Some(PauliGenerator {
            key: PauliKey::new(diff, y),
        })
    }

    pub fn key(&self) -> PauliKey {
        self.key
    }
}
