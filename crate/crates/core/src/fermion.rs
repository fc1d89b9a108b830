//! Normal-ordered fermionic operators over spin orbitals.
//!
//! A term `a†_{p1}…a†_{pn} a_{qn}…a_{q1}` with `p1<…<pn` and `q1<…<qn` is
//! stored as a pair of bitmasks; any other ordering is folded into the
//! coefficient with the fermionic parity. Spin orbitals are interleaved:
//! `2i` is the alpha and `2i+1` the beta spin orbital of spatial orbital `i`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::{Error, Result, ZERO_FLOOR};

#[inline]
pub(crate) fn below(p: u32) -> u64 {
    if p >= 64 {
        !0
    } else {
        (1u64 << p) - 1
    }
}

#[inline]
fn above(p: u32) -> u64 {
    if p >= 63 {
        0
    } else {
        !0u64 << (p + 1)
    }
}

/// Parity of the number of pairs `(x, y)` with `x ∈ hi`, `y ∈ lo`, `x > y`.
#[inline]
fn cross_parity(hi: u64, lo: u64) -> bool {
    let mut count = 0u32;
    let mut rest = lo;
    while rest != 0 {
        let y = rest.trailing_zeros();
        count += (hi & above(y)).count_ones();
        rest &= rest - 1;
    }
    count & 1 == 1
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(b)
        }
    })
}

/// A single creation or annihilation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Ladder {
            mode,
            dagger: false,
        }
    }
}

/// Canonical key of a normal-ordered, particle-conserving term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FermionKey {
    pub cre: u64,
    pub ann: u64,
}

/// Pure/spectator split of a term's indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexClasses {
    pub pure_creations: u64,
    pub pure_annihilations: u64,
    pub spectators: u64,
}

impl IndexClasses {
    pub fn pure_pairs(&self) -> usize {
        self.pure_creations.count_ones() as usize
    }

    pub fn spectator_count(&self) -> usize {
        self.spectators.count_ones() as usize
    }
}

impl FermionKey {
    pub const IDENTITY: FermionKey = FermionKey { cre: 0, ann: 0 };

    /// Builds a key from index lists. Returns `None` if an index repeats
    /// within a list (the term vanishes), the lengths differ, or an index
    /// does not fit in 64 modes. Input order is irrelevant; the returned sign
    /// folds the permutation to canonical order.
    pub fn from_indices(creations: &[usize], annihilations: &[usize]) -> Option<(Self, f64)> {
        if creations.len() != annihilations.len() {
            return None;
        }
        let mut events: Vec<Ladder> = creations.iter().map(|&p| Ladder::create(p)).collect();
        events.extend(annihilations.iter().map(|&q| Ladder::annihilate(q)));
        if events.iter().any(|e| e.mode >= 64) {
            return None;
        }
        canonicalize(&events).map(|(key, sign)| (key, if sign { -1.0 } else { 1.0 }))
    }

    /// Key from already sorted, duplicate-free index lists.
    pub fn new(creations: &[usize], annihilations: &[usize]) -> Self {
        assert_eq!(
            creations.len(),
            annihilations.len(),
            "particle-number violating term"
        );
        let cre = creations.iter().fold(0u64, |m, &p| m | (1 << p));
        let ann = annihilations.iter().fold(0u64, |m, &q| m | (1 << q));
        assert_eq!(cre.count_ones() as usize, creations.len(), "repeated creation index");
        assert_eq!(ann.count_ones() as usize, annihilations.len(), "repeated annihilation index");
        FermionKey { cre, ann }
    }

    pub fn is_identity(&self) -> bool {
        self.cre == 0 && self.ann == 0
    }

    /// Excitation rank: number of creation operators.
    pub fn rank(&self) -> usize {
        self.cre.count_ones() as usize
    }

    pub fn creations(&self) -> Vec<usize> {
        bits(self.cre).collect()
    }

    pub fn annihilations(&self) -> Vec<usize> {
        bits(self.ann).collect()
    }

    pub fn support(&self) -> u64 {
        self.cre | self.ann
    }

    /// Hermitian conjugate; canonical keys map to canonical keys with sign +1.
    pub fn dagger(&self) -> FermionKey {
        FermionKey {
            cre: self.ann,
            ann: self.cre,
        }
    }

    pub fn classify(&self) -> IndexClasses {
        let spectators = self.cre & self.ann;
        IndexClasses {
            pure_creations: self.cre & !spectators,
            pure_annihilations: self.ann & !spectators,
            spectators,
        }
    }

    /// Action on an occupation bitstring: `Some((new_det, sign))` or `None`
    /// if the term annihilates it.
    #[inline]
    pub fn apply(&self, det: u64) -> Option<(u64, f64)> {
        if det & self.ann != self.ann {
            return None;
        }
        let mut d = det;
        let mut odd = false;
        let mut rest = self.ann;
        while rest != 0 {
            let q = rest.trailing_zeros();
            odd ^= (d & below(q)).count_ones() & 1 == 1;
            d ^= 1 << q;
            rest &= rest - 1;
        }
        if d & self.cre != 0 {
            return None;
        }
        let mut rest = self.cre;
        while rest != 0 {
            let p = 63 - rest.leading_zeros();
            odd ^= (d & below(p)).count_ones() & 1 == 1;
            d |= 1 << p;
            rest &= !(1u64 << p);
        }
        Some((d, if odd { -1.0 } else { 1.0 }))
    }
}

impl Ord for FermionKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank(), self.cre, self.ann).cmp(&(other.rank(), other.cre, other.ann))
    }
}

impl PartialOrd for FermionKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FermionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |m: u64| {
            bits(m)
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "[{} | {}]", join(self.cre), join(self.ann))
    }
}

/// Sorts a fully normal-ordered event list (creators first) into a canonical
/// key. Returns `None` for repeated indices; the bool is the sign parity.
fn canonicalize(events: &[Ladder]) -> Option<(FermionKey, bool)> {
    let split = events.iter().position(|e| !e.dagger).unwrap_or(events.len());
    debug_assert!(events[split..].iter().all(|e| !e.dagger));
    let mut odd = false;
    let mut cre = 0u64;
    let mut ann = 0u64;
    // creators: target ascending; count inversions
    let creators: Vec<usize> = events[..split].iter().map(|e| e.mode).collect();
    for (i, &a) in creators.iter().enumerate() {
        for &b in &creators[i + 1..] {
            if a == b {
                return None;
            }
            if a > b {
                odd = !odd;
            }
        }
        cre |= 1 << a;
    }
    // annihilators: target descending
    let annihilators: Vec<usize> = events[split..].iter().map(|e| e.mode).collect();
    for (i, &a) in annihilators.iter().enumerate() {
        for &b in &annihilators[i + 1..] {
            if a == b {
                return None;
            }
            if a < b {
                odd = !odd;
            }
        }
        ann |= 1 << a;
    }
    Some((FermionKey { cre, ann }, odd))
}

/// Normal orders an arbitrary product of ladder operators, generating the
/// lower-rank contraction terms from the anticommutation relations.
///
/// The product must contain as many creators as annihilators.
pub fn normal_order(events: &[Ladder]) -> FermionOperator {
    let creators = events.iter().filter(|e| e.dagger).count();
    assert_eq!(
        2 * creators,
        events.len(),
        "normal_order: particle-number violating product"
    );
    assert!(events.iter().all(|e| e.mode < 64), "mode index out of range");
    let mut out = FermionOperator::new();
    let mut stack: Vec<(Vec<Ladder>, f64)> = vec![(events.to_vec(), 1.0)];
    while let Some((ev, c)) = stack.pop() {
        let swap_at = ev.windows(2).position(|w| !w[0].dagger && w[1].dagger);
        match swap_at {
            None => {
                if let Some((key, odd)) = canonicalize(&ev) {
                    out.add_term(key, if odd { -c } else { c });
                }
            }
            Some(i) => {
                if ev[i].mode == ev[i + 1].mode {
                    let mut contracted = ev.clone();
                    contracted.drain(i..i + 2);
                    stack.push((contracted, c));
                }
                let mut swapped = ev;
                swapped.swap(i, i + 1);
                stack.push((swapped, -c));
            }
        }
    }
    out.prune(ZERO_FLOOR);
    out
}

/// Product of two canonical terms, pushed as canonical terms onto `out`.
fn mul_keys_into(a: FermionKey, b: FermionKey, coeff: f64, out: &mut Vec<(FermionKey, f64)>) {
    // a = C(P) A(Q), b = C(R) A(S). The annihilators of Q move right through
    // C(R) lowest index first; each either passes or contracts.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        p: u64,
        q_rest: u64,
        r: u64,
        q_kept: u64,
        s: u64,
        odd: bool,
        coeff: f64,
        out: &mut Vec<(FermionKey, f64)>,
    ) {
        if q_rest == 0 {
            if p & r != 0 || q_kept & s != 0 {
                return;
            }
            let odd = odd ^ cross_parity(p, r) ^ cross_parity(s, q_kept);
            out.push((
                FermionKey {
                    cre: p | r,
                    ann: q_kept | s,
                },
                if odd { -coeff } else { coeff },
            ));
            return;
        }
        let q = q_rest.trailing_zeros();
        let bit = 1u64 << q;
        let rest = q_rest & !bit;
        if r & bit != 0 {
            let c_odd = odd ^ ((r & below(q)).count_ones() & 1 == 1);
            walk(p, rest, r & !bit, q_kept, s, c_odd, coeff, out);
        }
        if s & bit == 0 {
            let p_odd = odd ^ (r.count_ones() & 1 == 1);
            walk(p, rest, r, q_kept | bit, s, p_odd, coeff, out);
        }
    }
    walk(a.cre, a.ann, b.cre, 0, b.ann, false, coeff, out);
}

/// Sorts by key and merges duplicates, dropping exact zeros.
pub(crate) fn compact(terms: &mut Vec<(FermionKey, f64)>) {
    terms.sort_by_key(|x| x.0);
    let mut merged: Vec<(FermionKey, f64)> = Vec::with_capacity(terms.len());
    for &(k, c) in terms.iter() {
        match merged.last_mut() {
            Some(last) if last.0 == k => last.1 += c,
            _ => merged.push((k, c)),
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    *terms = merged;
}

/// Product of two term lists, compacted.
pub(crate) fn mul_terms(a: &[(FermionKey, f64)], b: &[(FermionKey, f64)]) -> Vec<(FermionKey, f64)> {
    let mut out = Vec::new();
    for &(ka, ca) in a {
        for &(kb, cb) in b {
            mul_keys_into(ka, kb, ca * cb, &mut out);
        }
    }
    compact(&mut out);
    out
}

/// `[a, b]` on term lists, compacted.
pub(crate) fn commutator_terms(
    a: &[(FermionKey, f64)],
    b: &[(FermionKey, f64)],
) -> Vec<(FermionKey, f64)> {
    let mut out = mul_terms(a, b);
    out.extend(mul_terms(b, a).into_iter().map(|(k, c)| (k, -c)));
    compact(&mut out);
    out
}

/// Real linear combination of canonical fermionic terms plus a constant.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FermionOperator {
    terms: BTreeMap<FermionKey, f64>,
    constant: f64,
}

impl FermionOperator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(c: f64) -> Self {
        FermionOperator {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn from_term(key: FermionKey, coeff: f64) -> Self {
        let mut op = Self::new();
        op.add_term(key, coeff);
        op
    }

    /// `Σ_p a†_p a_p` over `n_modes` spin orbitals.
    pub fn number_operator(n_modes: usize) -> Self {
        let mut op = Self::new();
        for p in 0..n_modes {
            op.add_term(FermionKey::new(&[p], &[p]), 1.0);
        }
        op
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn set_constant(&mut self, c: f64) {
        self.constant = c;
    }

    /// Adds `coeff` to the term; the identity key feeds the constant.
    pub fn add_term(&mut self, key: FermionKey, coeff: f64) {
        if key.is_identity() {
            self.constant += coeff;
        } else {
            *self.terms.entry(key).or_insert(0.0) += coeff;
        }
    }

    pub fn coefficient(&self, key: &FermionKey) -> f64 {
        if key.is_identity() {
            self.constant
        } else {
            self.terms.get(key).copied().unwrap_or(0.0)
        }
    }

    /// Number of stored non-identity terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant == 0.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FermionKey, &f64)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> &BTreeMap<FermionKey, f64> {
        &self.terms
    }

    /// Removes stored coefficients with magnitude below `floor`.
    pub fn prune(&mut self, floor: f64) {
        self.terms.retain(|_, c| c.abs() >= floor);
        if self.constant.abs() < floor {
            self.constant = 0.0;
        }
    }

    pub fn retain<F: FnMut(&FermionKey, f64) -> bool>(&mut self, mut f: F) {
        self.terms.retain(|k, c| f(k, *c));
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.constant *= s;
        out.prune(ZERO_FLOOR);
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &FermionOperator, s: f64) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, s * c);
        }
        out.constant += s * other.constant;
        out.prune(ZERO_FLOOR);
        out
    }

    pub fn dagger(&self) -> Self {
        FermionOperator {
            terms: self.terms.iter().map(|(k, c)| (k.dagger(), *c)).collect(),
            constant: self.constant,
        }
    }

    /// Largest coefficient mismatch between the operator and its adjoint.
    pub fn hermiticity_error(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| (c - self.coefficient(&k.dagger())).abs())
            .fold(0.0, f64::max)
    }

    fn as_list(&self) -> Vec<(FermionKey, f64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, *c)).collect();
        if self.constant != 0.0 {
            v.push((FermionKey::IDENTITY, self.constant));
        }
        v
    }

    fn from_list(list: Vec<(FermionKey, f64)>) -> Self {
        let mut op = Self::new();
        for (k, c) in list {
            op.add_term(k, c);
        }
        op.prune(ZERO_FLOOR);
        op
    }

    /// Normal-ordered product `self · other`.
    pub fn multiply(&self, other: &FermionOperator) -> FermionOperator {
        Self::from_list(mul_terms(&self.as_list(), &other.as_list()))
    }

    /// `[self, other]`, normal ordered.
    pub fn commutator(&self, other: &FermionOperator) -> FermionOperator {
        Self::from_list(commutator_terms(&self.as_list(), &other.as_list()))
    }

    /// `H|det⟩` as a list of `(det', amplitude)` (unmerged).
    pub fn apply_to_determinant(&self, det: u64) -> Vec<(u64, f64)> {
        let mut out = Vec::new();
        if self.constant != 0.0 {
            out.push((det, self.constant));
        }
        for (k, c) in &self.terms {
            if let Some((d, s)) = k.apply(det) {
                out.push((d, s * c));
            }
        }
        out
    }

    /// Conjugation `e^{-θA} H e^{θA}` applied term by term.
    pub fn conjugate(&self, generator: &FermionGenerator, theta: f64, exec: Execution) -> Self {
        if theta == 0.0 {
            return self.clone();
        }
        let rotation = RotationFactors::new(theta);
        let entries: Vec<(FermionKey, f64)> = self.terms.iter().map(|(k, c)| (*k, *c)).collect();
        let pieces = exec.map(&entries, |&(k, c)| {
            let mut out = Vec::new();
            bch_term_into(k, c, generator, &rotation, &mut out);
            out
        });
        let mut result = FermionOperator::identity(self.constant);
        for piece in pieces {
            for (k, c) in piece {
                result.add_term(k, c);
            }
        }
        result.prune(ZERO_FLOOR);
        result
    }
}

/// Anti-Hermitian generator `A = E − E†` built from a pure excitation `E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FermionGenerator {
    excitation: FermionKey,
    negative: bool,
}

impl FermionGenerator {
    /// `E = sign · excitation`. The excitation must create only into
    /// orbitals unoccupied in `reference` and annihilate only occupied ones.
    pub fn new(excitation: FermionKey, sign: f64, reference: u64) -> Result<Self> {
        let pure = excitation.cre & excitation.ann == 0
            && excitation.rank() > 0
            && excitation.cre.count_ones() == excitation.ann.count_ones()
            && excitation.cre & reference == 0
            && excitation.ann & !reference == 0;
        if !pure {
            return Err(Error::NotPureExcitation(excitation.to_string()));
        }
        let generator = FermionGenerator {
            excitation,
            negative: sign < 0.0,
        };
        let a = generator.terms();
        let mut cube = mul_terms(&mul_terms(&a, &a), &a);
        cube.extend(a.iter().copied());
        compact(&mut cube);
        if !cube.is_empty() {
            return Err(Error::NotNilpotent);
        }
        Ok(generator)
    }

    pub fn excitation(&self) -> FermionKey {
        self.excitation
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn rank(&self) -> usize {
        self.excitation.rank()
    }

    /// `A` as a term list: `[(E, s), (E†, −s)]`.
    pub(crate) fn terms(&self) -> [(FermionKey, f64); 2] {
        let s = self.sign();
        [(self.excitation, s), (self.excitation.dagger(), -s)]
    }

    pub fn anti_hermitian(&self) -> FermionOperator {
        FermionOperator::from_list(self.terms().to_vec())
    }

    /// Applies `A` to an occupation bitstring.
    #[inline]
    pub fn apply(&self, det: u64) -> Option<(u64, f64)> {
        let s = self.sign();
        if let Some((d, sg)) = self.excitation.apply(det) {
            return Some((d, s * sg));
        }
        self.excitation
            .dagger()
            .apply(det)
            .map(|(d, sg)| (d, -s * sg))
    }
}

/// Which closed form applies to a single term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BchCase {
    /// `[E, A] = 0`: the term is invariant.
    Commuting,
    /// `A [E, A] A = 0`: `E + sinθ [E,A] + (1 − cosθ) [[E,A],A]`.
    Nested,
    /// General: `E + ½ sin2θ [E,A] + ½ sin²θ [[E,A],A]`.
    General,
}

struct RotationFactors {
    nested: (f64, f64),
    general: (f64, f64),
}

impl RotationFactors {
    fn new(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        RotationFactors {
            nested: (s, 1.0 - c),
            general: (s * c, 0.5 * s * s),
        }
    }
}

type TermList = Vec<(FermionKey, f64)>;

/// Single and double commutators of a unit term with `A`, plus the case.
pub(crate) fn bch_expansion(key: FermionKey, generator: &FermionGenerator) -> (BchCase, TermList, TermList) {
    let a = generator.terms();
    let a_support = generator.excitation.support();
    if key.support() & a_support == 0 {
        return (BchCase::Commuting, Vec::new(), Vec::new());
    }
    let single = commutator_terms(&[(key, 1.0)], &a);
    if single.is_empty() {
        return (BchCase::Commuting, single, Vec::new());
    }
    let double = commutator_terms(&single, &a);
    let sandwich = mul_terms(&mul_terms(&a, &single), &a);
    let case = if sandwich.is_empty() {
        BchCase::Nested
    } else {
        BchCase::General
    };
    (case, single, double)
}

fn bch_term_into(
    key: FermionKey,
    coeff: f64,
    generator: &FermionGenerator,
    rotation: &RotationFactors,
    out: &mut Vec<(FermionKey, f64)>,
) {
    out.push((key, coeff));
    let (case, single, double) = bch_expansion(key, generator);
    let (f1, f2) = match case {
        BchCase::Commuting => return,
        BchCase::Nested => rotation.nested,
        BchCase::General => rotation.general,
    };
    out.extend(single.iter().map(|&(k, c)| (k, coeff * f1 * c)));
    out.extend(double.iter().map(|&(k, c)| (k, coeff * f2 * c)));
}

/// Closed-form `e^{−θA} (h·E) e^{θA}` for one term.
pub fn bch_fermionic_term(
    key: FermionKey,
    coeff: f64,
    generator: &FermionGenerator,
    theta: f64,
) -> FermionOperator {
    let mut out = Vec::new();
    if theta == 0.0 {
        out.push((key, coeff));
    } else {
        bch_term_into(key, coeff, generator, &RotationFactors::new(theta), &mut out);
    }
    FermionOperator::from_list(out)
}

/// Case classification used by [`bch_fermionic_term`].
pub fn bch_case(key: FermionKey, generator: &FermionGenerator) -> BchCase {
    bch_expansion(key, generator).0
}
