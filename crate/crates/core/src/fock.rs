//! Occupation-number (Fock) states for identical bosons and fermions.
//!
//! A many-particle state is stored in second quantization: a superposition
//! over occupation vectors `|n_0, n_1, ..., n_{N-1}>` at fixed particle
//! number. Exchange symmetry is built into the representation, so there are
//! no particle labels to symmetrize over.
//!
//! Basis order everywhere in this crate is lexicographically *descending* in
//! the counts, e.g. `(2,0), (1,1), (0,2)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{FockError, FockResult};

/// Amplitudes with magnitude below this are dropped from a [`FockVector`].
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Allowed deviation of a state's squared norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParticleKind {
    Boson,
    Fermion,
}

impl fmt::Display for ParticleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParticleKind::Boson => write!(f, "boson"),
            ParticleKind::Fermion => write!(f, "fermion"),
        }
    }
}

/// Mode occupations `(n_0, ..., n_{N-1})` of one Fock basis element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct OccupationVector {
    counts: Vec<usize>,
}

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> FockResult<Self> {
        if counts.is_empty() {
            return Err(FockError::InvalidArgument(
                "occupation vector needs at least one mode".into(),
            ));
        }
        Ok(Self { counts })
    }

    /// Like [`OccupationVector::new`], additionally enforcing Pauli exclusion
    /// for fermions.
    pub fn for_kind(kind: ParticleKind, counts: Vec<usize>) -> FockResult<Self> {
        let occ = Self::new(counts)?;
        occ.check_kind(kind)?;
        Ok(occ)
    }

    pub fn check_kind(&self, kind: ParticleKind) -> FockResult<()> {
        if kind == ParticleKind::Fermion {
            if let Some((mode, &count)) = self.counts.iter().enumerate().find(|(_, &c)| c > 1) {
                return Err(FockError::PauliExclusion { mode, count });
            }
        }
        Ok(())
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_modes(&self) -> usize {
        self.counts.len()
    }

    /// Total particle number.
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Mode indices, each repeated by its occupation, ascending.
    pub fn mode_list(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(mode, &c)| std::iter::repeat_n(mode, c))
            .collect()
    }

    /// `prod_i n_i!`
    pub fn factorial_product(&self) -> f64 {
        self.counts.iter().map(|&c| factorial(c)).product()
    }

    /// True if any mode holds an odd number of particles.
    pub fn has_odd_count(&self) -> bool {
        self.counts.iter().any(|c| c % 2 == 1)
    }

    /// Parses `"1,0,2"` (whitespace tolerated, optional surrounding parens).
    pub fn parse(s: &str) -> FockResult<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let counts = trimmed
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| FockError::Parse(format!("bad occupation entry {tok:?} in {s:?}")))
            })
            .collect::<FockResult<Vec<_>>>()?;
        Self::new(counts)
    }
}

impl TryFrom<Vec<usize>> for OccupationVector {
    type Error = FockError;

    fn try_from(counts: Vec<usize>) -> FockResult<Self> {
        Self::new(counts)
    }
}

impl From<OccupationVector> for Vec<usize> {
    fn from(occ: OccupationVector) -> Self {
        occ.counts
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Number of basis states: `C(N+M-1, M)` for bosons, `C(N, M)` for fermions.
pub fn basis_size(kind: ParticleKind, num_modes: usize, num_particles: usize) -> usize {
    match kind {
        ParticleKind::Boson => binomial(num_modes + num_particles - 1, num_particles),
        ParticleKind::Fermion if num_particles > num_modes => 0,
        ParticleKind::Fermion => binomial(num_modes, num_particles),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All occupation vectors with `num_particles` particles in `num_modes`
/// modes, lexicographically descending.
pub fn enumerate_basis(
    kind: ParticleKind,
    num_modes: usize,
    num_particles: usize,
) -> FockResult<Vec<OccupationVector>> {
    if num_modes == 0 {
        return Err(FockError::InvalidArgument("num_modes must be at least 1".into()));
    }
    if kind == ParticleKind::Fermion && num_particles > num_modes {
        return Err(FockError::InvalidArgument(format!(
            "{num_particles} fermions do not fit in {num_modes} modes"
        )));
    }
    let cap = match kind {
        ParticleKind::Boson => num_particles,
        ParticleKind::Fermion => 1,
    };
    let mut out = Vec::with_capacity(basis_size(kind, num_modes, num_particles));
    let mut counts = vec![0; num_modes];
    fill(&mut counts, 0, num_particles, cap, &mut out);
    Ok(out)
}

fn fill(counts: &mut [usize], mode: usize, left: usize, cap: usize, out: &mut Vec<OccupationVector>) {
    if mode + 1 == counts.len() {
        if left <= cap {
            counts[mode] = left;
            out.push(OccupationVector { counts: counts.to_vec() });
        }
        return;
    }
    for c in (0..=left.min(cap)).rev() {
        counts[mode] = c;
        fill(counts, mode + 1, left - c, cap, out);
    }
    counts[mode] = 0;
}

/// Normalized superposition of Fock basis states at fixed particle number.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    kind: ParticleKind,
    num_modes: usize,
    num_particles: usize,
    amplitudes: BTreeMap<OccupationVector, C64>,
}

impl FockVector {
    /// Builds a state from `(occupation, amplitude)` terms and normalizes it.
    /// Repeated occupations are summed.
    pub fn from_terms<I>(kind: ParticleKind, num_modes: usize, terms: I) -> FockResult<Self>
    where
        I: IntoIterator<Item = (OccupationVector, C64)>,
    {
        let mut amplitudes: BTreeMap<OccupationVector, C64> = BTreeMap::new();
        let mut num_particles = None;
        for (occ, amp) in terms {
            if occ.num_modes() != num_modes {
                return Err(FockError::DimensionMismatch {
                    expected: num_modes,
                    found: occ.num_modes(),
                });
            }
            occ.check_kind(kind)?;
            match num_particles {
                None => num_particles = Some(occ.total()),
                Some(m) if m != occ.total() => {
                    return Err(FockError::TotalMismatch { input: m, output: occ.total() })
                }
                _ => {}
            }
            *amplitudes.entry(occ).or_default() += amp;
        }
        let norm = amplitudes.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= PRUNE_THRESHOLD {
            return Err(FockError::ZeroNorm);
        }
        for a in amplitudes.values_mut() {
            *a /= norm;
        }
        Ok(Self::from_parts(kind, num_modes, num_particles.unwrap_or(0), amplitudes))
    }

    /// Amplitude 1 on a single basis element.
    pub fn basis_state(kind: ParticleKind, occ: OccupationVector) -> FockResult<Self> {
        let n = occ.num_modes();
        Self::from_terms(kind, n, [(occ, C64::new(1.0, 0.0))])
    }

    /// One particle created in each listed mode; repeats are allowed for
    /// bosons. For fermions the sign is that of the permutation sorting
    /// `occupied_modes` ascending, ascending creation order being the
    /// positive reference.
    pub fn from_single_modes(
        kind: ParticleKind,
        num_modes: usize,
        occupied_modes: &[usize],
    ) -> FockResult<Self> {
        if num_modes == 0 {
            return Err(FockError::InvalidArgument("num_modes must be at least 1".into()));
        }
        let mut counts = vec![0; num_modes];
        for &m in occupied_modes {
            if m >= num_modes {
                return Err(FockError::InvalidArgument(format!(
                    "mode index {m} out of range for {num_modes} modes"
                )));
            }
            counts[m] += 1;
        }
        let occ = OccupationVector::for_kind(kind, counts)?;
        let sign = match kind {
            ParticleKind::Boson => 1.0,
            ParticleKind::Fermion => permutation_sign(occupied_modes),
        };
        Self::from_terms(kind, num_modes, [(occ, C64::new(sign, 0.0))])
    }

    pub(crate) fn from_parts(
        kind: ParticleKind,
        num_modes: usize,
        num_particles: usize,
        mut amplitudes: BTreeMap<OccupationVector, C64>,
    ) -> Self {
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        Self { kind, num_modes, num_particles, amplitudes }
    }

    pub fn kind(&self) -> ParticleKind {
        self.kind
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn num_particles(&self) -> usize {
        self.num_particles
    }

    /// Amplitude on `occ`, zero when absent.
    pub fn amplitude(&self, occ: &OccupationVector) -> C64 {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    /// Stored terms in basis order (lexicographically descending).
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, C64)> {
        self.amplitudes.iter().rev().map(|(o, a)| (o, *a))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &FockVector) -> FockResult<C64> {
        self.check_compatible(other)?;
        Ok(self
            .amplitudes
            .iter()
            .filter_map(|(occ, a)| other.amplitudes.get(occ).map(|b| a.conj() * b))
            .sum())
    }

    pub(crate) fn check_compatible(&self, other: &FockVector) -> FockResult<()> {
        if self.kind != other.kind {
            return Err(FockError::InvalidArgument(format!(
                "cannot combine {} and {} states",
                self.kind, other.kind
            )));
        }
        if self.num_modes != other.num_modes {
            return Err(FockError::DimensionMismatch {
                expected: self.num_modes,
                found: other.num_modes,
            });
        }
        if self.num_particles != other.num_particles {
            return Err(FockError::TotalMismatch {
                input: self.num_particles,
                output: other.num_particles,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let repr = FockVectorRepr {
            kind: self.kind,
            num_modes: self.num_modes,
            terms: self
                .terms()
                .map(|(occ, a)| TermRepr { counts: occ.clone(), re: a.re, im: a.im })
                .collect(),
        };
        serde_json::to_value(repr).expect("plain data serializes")
    }

    /// Parses `{kind, num_modes, terms: [{counts, re, im}]}`; the result is
    /// normalized.
    pub fn from_json(value: &serde_json::Value) -> FockResult<Self> {
        let repr: FockVectorRepr =
            serde_json::from_value(value.clone()).map_err(|e| FockError::Parse(e.to_string()))?;
        Self::from_terms(
            repr.kind,
            repr.num_modes,
            repr.terms.into_iter().map(|t| (t.counts, C64::new(t.re, t.im))),
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FockVectorRepr {
    kind: ParticleKind,
    num_modes: usize,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    counts: OccupationVector,
    re: f64,
    im: f64,
}

/// Sign of the permutation that sorts `items` ascending. Items must be
/// distinct.
fn permutation_sign(items: &[usize]) -> f64 {
    let inversions = items
        .iter()
        .enumerate()
        .map(|(i, a)| items[i + 1..].iter().filter(|b| *b < a).count())
        .sum::<usize>();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Outcome probabilities over occupation vectors, in basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    entries: Vec<(OccupationVector, f64)>,
}

impl OutcomeDistribution {
    pub(crate) fn new(entries: Vec<(OccupationVector, f64)>) -> Self {
        Self { entries }
    }

    /// Probability of `occ`; zero for outcomes not listed.
    pub fn probability(&self, occ: &OccupationVector) -> f64 {
        self.entries
            .iter()
            .find(|(o, _)| o == occ)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn entries(&self) -> &[(OccupationVector, f64)] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// `occupation,probability` rows, occupations rendered as `"(1,1)"`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("occupation,probability\n");
        for (occ, p) in &self.entries {
            out.push_str(&format!("\"{occ}\",{p:?}\n"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|(occ, p)| serde_json::json!({ "counts": occ, "probability": p }))
                .collect(),
        )
    }
}

/// Born-rule probabilities of a projective measurement in the occupation
/// basis. Every basis element is listed, including zero-probability ones.
pub fn measurement_collapse(state: &FockVector) -> OutcomeDistribution {
    let basis = enumerate_basis(state.kind, state.num_modes, state.num_particles)
        .expect("a constructed state has a valid basis");
    OutcomeDistribution::new(
        basis
            .into_iter()
            .map(|occ| {
                let p = state.amplitude(&occ).norm_sqr();
                (occ, p)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(c: &[usize]) -> OccupationVector {
        OccupationVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn two_bosons_two_modes() {
        let basis = enumerate_basis(ParticleKind::Boson, 2, 2).unwrap();
        assert_eq!(basis, vec![occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]);
    }

    #[test]
    fn two_fermions_two_modes() {
        let basis = enumerate_basis(ParticleKind::Fermion, 2, 2).unwrap();
        assert_eq!(basis, vec![occ(&[1, 1])]);
    }

    #[test]
    fn three_modes_brute_force() {
        // every vector in {0..=2}^3 with total 2
        let mut brute = Vec::new();
        for a in 0..=2 {
            for b in 0..=2 {
                for c in 0..=2 {
                    if a + b + c == 2 {
                        brute.push(occ(&[a, b, c]));
                    }
                }
            }
        }
        brute.sort();
        brute.reverse();
        assert_eq!(enumerate_basis(ParticleKind::Boson, 3, 2).unwrap(), brute);
        assert_eq!(brute.len(), 6);
    }

    #[test]
    fn enumeration_errors() {
        assert!(enumerate_basis(ParticleKind::Fermion, 2, 3).is_err());
        assert!(enumerate_basis(ParticleKind::Boson, 0, 1).is_err());
        assert_eq!(enumerate_basis(ParticleKind::Boson, 3, 0).unwrap(), vec![occ(&[0, 0, 0])]);
        assert_eq!(enumerate_basis(ParticleKind::Boson, 1, 4).unwrap(), vec![occ(&[4])]);
    }

    #[test]
    fn single_mode_constructor() {
        let s = FockVector::from_single_modes(ParticleKind::Boson, 2, &[0, 1]).unwrap();
        assert_eq!(s.amplitude(&occ(&[1, 1])), C64::new(1.0, 0.0));
        assert_eq!(s.len(), 1);
        let s = FockVector::from_single_modes(ParticleKind::Boson, 2, &[0, 0]).unwrap();
        assert_eq!(s.amplitude(&occ(&[2, 0])), C64::new(1.0, 0.0));
        let err = FockVector::from_single_modes(ParticleKind::Fermion, 2, &[0, 0]).unwrap_err();
        assert_eq!(err, FockError::PauliExclusion { mode: 0, count: 2 });
        assert!(FockVector::from_single_modes(ParticleKind::Boson, 2, &[2]).is_err());
    }

    #[test]
    fn fermion_order_sign() {
        let a = FockVector::from_single_modes(ParticleKind::Fermion, 3, &[0, 2]).unwrap();
        let b = FockVector::from_single_modes(ParticleKind::Fermion, 3, &[2, 0]).unwrap();
        assert_eq!(a.amplitude(&occ(&[1, 0, 1])), C64::new(1.0, 0.0));
        assert_eq!(b.amplitude(&occ(&[1, 0, 1])), C64::new(-1.0, 0.0));
    }

    #[test]
    fn inner_products() {
        let x = FockVector::basis_state(ParticleKind::Boson, occ(&[2, 0])).unwrap();
        let y = FockVector::basis_state(ParticleKind::Boson, occ(&[0, 2])).unwrap();
        assert_eq!(x.inner_product(&y).unwrap(), C64::new(0.0, 0.0));
        assert!((x.inner_product(&x).unwrap() - 1.0).norm() < 1e-15);

        let sup = FockVector::from_terms(
            ParticleKind::Boson,
            2,
            [(occ(&[2, 0]), C64::new(1.0, 0.0)), (occ(&[0, 2]), C64::new(1.0, 0.0))],
        )
        .unwrap();
        let ip = sup.inner_product(&x).unwrap();
        assert!((ip - C64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);

        let z = FockVector::basis_state(ParticleKind::Boson, occ(&[1, 0])).unwrap();
        assert!(matches!(x.inner_product(&z), Err(FockError::TotalMismatch { .. })));
        let w = FockVector::basis_state(ParticleKind::Boson, occ(&[2, 0, 0])).unwrap();
        assert!(matches!(x.inner_product(&w), Err(FockError::DimensionMismatch { .. })));
    }

    #[test]
    fn conjugate_linear_first_slot() {
        let x = FockVector::from_terms(
            ParticleKind::Boson,
            2,
            [(occ(&[2, 0]), C64::new(0.0, 1.0)), (occ(&[1, 1]), C64::new(1.0, 0.0))],
        )
        .unwrap();
        let y = FockVector::basis_state(ParticleKind::Boson, occ(&[2, 0])).unwrap();
        let xy = x.inner_product(&y).unwrap();
        let yx = y.inner_product(&x).unwrap();
        assert!((xy - yx.conj()).norm() < 1e-15);
        assert!((xy - C64::new(0.0, -0.5f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn pruning_and_zero_norm() {
        let s = FockVector::from_terms(
            ParticleKind::Boson,
            2,
            [(occ(&[2, 0]), C64::new(1.0, 0.0)), (occ(&[1, 1]), C64::new(1e-16, 0.0))],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        let err = FockVector::from_terms(ParticleKind::Boson, 2, [(occ(&[2, 0]), C64::new(0.0, 0.0))]);
        assert_eq!(err.unwrap_err(), FockError::ZeroNorm);
        let mixed = FockVector::from_terms(
            ParticleKind::Boson,
            2,
            [(occ(&[2, 0]), C64::new(1.0, 0.0)), (occ(&[1, 0]), C64::new(1.0, 0.0))],
        );
        assert!(matches!(mixed, Err(FockError::TotalMismatch { .. })));
    }

    #[test]
    fn json_shape() {
        let s = FockVector::from_terms(
            ParticleKind::Boson,
            2,
            [(occ(&[2, 0]), C64::new(0.6, 0.0)), (occ(&[0, 2]), C64::new(0.0, 0.8))],
        )
        .unwrap();
        let v = s.to_json();
        assert_eq!(v["kind"], "boson");
        assert_eq!(v["num_modes"], 2);
        assert_eq!(v["terms"][0]["counts"], serde_json::json!([2, 0]));
        assert_eq!(FockVector::from_json(&v).unwrap(), s);
        assert_eq!(serde_json::to_string(&occ(&[1, 0, 2])).unwrap(), "[1,0,2]");
        let bad = serde_json::json!({"kind": "fermion", "num_modes": 2, "terms": [{"counts": [2, 0], "re": 1.0, "im": 0.0}]});
        assert!(FockVector::from_json(&bad).is_err());
        assert!(serde_json::from_str::<OccupationVector>("[]").is_err());
    }

    #[test]
    fn collapse_examples() {
        let basis = FockVector::basis_state(ParticleKind::Boson, occ(&[1, 1])).unwrap();
        let d = measurement_collapse(&basis);
        assert_eq!(d.probability(&occ(&[1, 1])), 1.0);
        assert_eq!(d.entries().len(), 3);

        let uniform = FockVector::from_terms(
            ParticleKind::Boson,
            2,
            enumerate_basis(ParticleKind::Boson, 2, 2)
                .unwrap()
                .into_iter()
                .map(|o| (o, C64::new(1.0, 0.0))),
        )
        .unwrap();
        for (_, p) in measurement_collapse(&uniform).entries() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }

        let half = FockVector::from_terms(
            ParticleKind::Boson,
            2,
            [(occ(&[2, 0]), C64::new(0.0, 1.0)), (occ(&[0, 2]), C64::new(0.0, 1.0))],
        )
        .unwrap();
        let d = measurement_collapse(&half);
        assert!((d.probability(&occ(&[2, 0])) - 0.5).abs() < 1e-15);
        assert!((d.probability(&occ(&[0, 2])) - 0.5).abs() < 1e-15);
        assert_eq!(d.probability(&occ(&[1, 1])), 0.0);
        assert!((d.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parse_occupation() {
        assert_eq!(OccupationVector::parse("1, 1").unwrap(), occ(&[1, 1]));
        assert_eq!(OccupationVector::parse("(2,0)").unwrap(), occ(&[2, 0]));
        assert!(OccupationVector::parse("1,-1").is_err());
        assert!(OccupationVector::parse("").is_err());
    }

    #[test]
    fn binomial_counts() {
        for n in 1..=6 {
            for m in 0..=6 {
                let b = enumerate_basis(ParticleKind::Boson, n, m).unwrap();
                assert_eq!(b.len(), basis_size(ParticleKind::Boson, n, m));
                if m <= n {
                    let f = enumerate_basis(ParticleKind::Fermion, n, m).unwrap();
                    assert_eq!(f.len(), basis_size(ParticleKind::Fermion, n, m));
                }
            }
        }
    }
}
