//! Irreversible dynamics: measurement, coarse-grained Markov chains and
//! dephasing channels.
//!
//! A unitary step followed by an occupation-basis measurement turns the
//! coherent dynamics of [`crate::optics`] into a Markov chain over basis
//! states. Coarse graining that chain (e.g. "both particles in the same
//! mode" vs "different modes") gives a small column-stochastic
//! [`TransferMatrix`] whose fixed point is the equilibrium distribution.
//!
//! Density-matrix operators here use the column convention: a unitary `V`
//! acts as `rho -> V rho V^+`, and the columns of a basis-change matrix are
//! the basis vectors.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{FockError, FockResult};
use crate::fock::{enumerate_basis, OccupationVector, ParticleKind};
use crate::optics::{lifted_matrix, SingleParticleUnitary};

pub use crate::fock::measurement_collapse;

/// Column sums and probability totals must hit 1 to within this.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;

/// Singular values of `T - I` (or `S - I`) below this count toward the
/// eigenvalue-1 multiplicity.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-10;

/// Hermiticity, trace and positivity tolerance for density matrices.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Minimum basis overlap magnitude for two bases to count as complementary.
pub const OVERLAP_TOLERANCE: f64 = 1e-8;

/// Upper bound on the number of steps [`mixing_profile`] will take.
pub const MAX_MIXING_STEPS: usize = 1_000_000;

/// Partition of a Fock basis into named outcome classes.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseGraining {
    name: String,
    kind: ParticleKind,
    num_modes: usize,
    num_particles: usize,
    classes: Vec<(String, Vec<OccupationVector>)>,
}

impl CoarseGraining {
    /// Validates that the classes are non-empty, disjoint and cover the
    /// basis of `(kind, num_modes, num_particles)`.
    pub fn new(
        name: impl Into<String>,
        kind: ParticleKind,
        num_modes: usize,
        num_particles: usize,
        classes: Vec<(String, Vec<OccupationVector>)>,
    ) -> FockResult<Self> {
        let basis = enumerate_basis(kind, num_modes, num_particles)?;
        let mut seen = vec![false; basis.len()];
        for (label, members) in &classes {
            if members.is_empty() {
                return Err(FockError::IncompletePartition(format!("class {label:?} is empty")));
            }
            for occ in members {
                let idx = basis.iter().position(|b| b == occ).ok_or_else(|| {
                    FockError::IncompletePartition(format!("{occ} is not in the basis"))
                })?;
                if seen[idx] {
                    return Err(FockError::IncompletePartition(format!("{occ} appears twice")));
                }
                seen[idx] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(FockError::IncompletePartition(format!("{} is not covered", basis[missing])));
        }
        Ok(Self { name: name.into(), kind, num_modes, num_particles, classes })
    }

    /// Two classes for `num_particles` bosons: `same` (all in one mode) and
    /// `diff` (everything else).
    pub fn same_vs_different(num_modes: usize, num_particles: usize) -> FockResult<Self> {
        if num_particles < 2 || num_modes < 2 {
            return Err(FockError::InvalidArgument(
                "same/diff grading needs at least 2 particles and 2 modes".into(),
            ));
        }
        let (same, diff): (Vec<_>, Vec<_>) = enumerate_basis(ParticleKind::Boson, num_modes, num_particles)?
            .into_iter()
            .partition(|occ| occ.counts().contains(&num_particles));
        Self::new(
            "same/diff",
            ParticleKind::Boson,
            num_modes,
            num_particles,
            vec![("same".into(), same), ("diff".into(), diff)],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> Vec<String> {
        self.classes.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn classes(&self) -> &[(String, Vec<OccupationVector>)] {
        &self.classes
    }
}

/// Probability distribution over named outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityVector {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> FockResult<Self> {
        if labels.len() != probs.len() {
            return Err(FockError::DimensionMismatch { expected: labels.len(), found: probs.len() });
        }
        if probs.is_empty() {
            return Err(FockError::NotStochastic("empty distribution".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(FockError::NotStochastic(format!("negative or NaN probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(FockError::NotStochastic(format!("probabilities sum to {total}")));
        }
        Ok(Self { labels, probs })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.probs[i])
    }

    pub fn l1_distance(&self, other: &ProbabilityVector) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Column-stochastic matrix: `entries[(i, j)]` is the probability of moving
/// from class `j` to class `i` in one cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    labels: Vec<String>,
    entries: DMatrix<f64>,
}

impl TransferMatrix {
    pub fn new(labels: Vec<String>, entries: DMatrix<f64>) -> FockResult<Self> {
        if !entries.is_square() || entries.nrows() != labels.len() {
            return Err(FockError::DimensionMismatch { expected: labels.len(), found: entries.nrows() });
        }
        if let Some(x) = entries
            .iter()
            .find(|&&x| !(-STOCHASTIC_TOLERANCE..=1.0 + STOCHASTIC_TOLERANCE).contains(&x))
        {
            return Err(FockError::NotStochastic(format!("entry {x} outside [0, 1]")));
        }
        for (j, col) in entries.column_iter().enumerate() {
            let s = col.sum();
            if (s - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(FockError::NotStochastic(format!("column {j} sums to {s}")));
            }
        }
        Ok(Self { labels, entries })
    }

    /// Builds from row-major nested rows.
    pub fn from_rows(labels: Vec<String>, rows: &[Vec<f64>]) -> FockResult<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(FockError::DimensionMismatch { expected: n, found: r.len() });
        }
        Self::new(labels, DMatrix::from_row_iterator(n, n, rows.iter().flatten().copied()))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// One step of the chain.
    pub fn apply(&self, p: &ProbabilityVector) -> FockResult<ProbabilityVector> {
        if p.probs.len() != self.dim() {
            return Err(FockError::DimensionMismatch { expected: self.dim(), found: p.probs.len() });
        }
        let v = &self.entries * DVector::from_column_slice(&p.probs);
        Ok(ProbabilityVector { labels: self.labels.clone(), probs: v.iter().copied().collect() })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = self.entries.row_iter().map(|r| r.iter().copied().collect()).collect();
        serde_json::json!({ "labels": self.labels, "entries": rows })
    }

    /// Header `to\from,<labels>` then one row per destination class.
    pub fn to_csv(&self) -> String {
        let mut out = format!("to\\from,{}\n", self.labels.join(","));
        for (label, row) in self.labels.iter().zip(self.entries.row_iter()) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&format!("{label},{}\n", cells.join(",")));
        }
        out
    }
}

/// Entry `(i, j)`: probability that one unitary-then-measure cycle started
/// from the uniform mixture over class `j` ends in class `i`.
pub fn derive_transfer_matrix(
    u: &SingleParticleUnitary,
    grading: &CoarseGraining,
) -> FockResult<TransferMatrix> {
    if u.dim() != grading.num_modes {
        return Err(FockError::DimensionMismatch { expected: grading.num_modes, found: u.dim() });
    }
    let basis = enumerate_basis(grading.kind, grading.num_modes, grading.num_particles)?;
    let lifted = lifted_matrix(u, grading.kind, grading.num_particles)?;
    let index_of = |occ: &OccupationVector| basis.iter().position(|b| b == occ).expect("validated grading");
    let k = grading.classes.len();
    let mut entries = DMatrix::zeros(k, k);
    for (j, (_, from)) in grading.classes.iter().enumerate() {
        let weight = 1.0 / from.len() as f64;
        for (i, (_, to)) in grading.classes.iter().enumerate() {
            let mut p = 0.0;
            for src in from {
                let b = index_of(src);
                for dst in to {
                    p += lifted[(index_of(dst), b)].norm_sqr();
                }
            }
            entries[(i, j)] = p * weight;
        }
    }
    TransferMatrix::new(grading.labels(), entries)
}

/// Right null vectors of a square complex matrix: singular vectors whose
/// singular value is below [`MULTIPLICITY_TOLERANCE`].
fn null_space(a: &DMatrix<C64>) -> Vec<DVector<C64>> {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < MULTIPLICITY_TOLERANCE)
        .map(|(i, _)| v_t.row(i).transpose().map(|z| z.conj()))
        .collect()
}

/// Number of singular values of `T - I` below [`MULTIPLICITY_TOLERANCE`].
pub fn eigenvalue_one_multiplicity(t: &TransferMatrix) -> usize {
    let n = t.dim();
    let shifted = (&t.entries - DMatrix::<f64>::identity(n, n)).map(|x| C64::new(x, 0.0));
    null_space(&shifted).len()
}

/// The unique stationary distribution, solved directly from `(T - I) pi = 0`
/// with `sum pi = 1`.
pub fn steady_state(t: &TransferMatrix) -> FockResult<ProbabilityVector> {
    let multiplicity = eigenvalue_one_multiplicity(t);
    if multiplicity != 1 {
        return Err(FockError::NonUniqueFixedPoint { multiplicity });
    }
    let n = t.dim();
    // rows of T - I are linearly dependent; swap the last for normalization
    let mut a = &t.entries - DMatrix::<f64>::identity(n, n);
    a.row_mut(n - 1).fill(1.0);
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or(FockError::NonUniqueFixedPoint { multiplicity })?;
    let probs: Vec<f64> = pi.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    ProbabilityVector::new(t.labels.clone(), probs.into_iter().map(|x| x / total).collect())
}

/// `T^steps`, by repeated squaring.
pub fn iterate_map(t: &TransferMatrix, steps: usize) -> TransferMatrix {
    let n = t.dim();
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut base = t.entries.clone();
    let mut k = steps;
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    TransferMatrix { labels: t.labels.clone(), entries: result }
}

/// Smallest `k` with `|T^k initial - pi|_1 <= epsilon`.
pub fn mixing_profile(t: &TransferMatrix, initial: &ProbabilityVector, epsilon: f64) -> FockResult<usize> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(FockError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let pi = steady_state(t)?;
    let mut p = initial.clone();
    for k in 0..=MAX_MIXING_STEPS {
        if p.l1_distance(&pi) <= epsilon {
            return Ok(k);
        }
        p = t.apply(&p)?;
    }
    Err(FockError::NotConverged { steps: MAX_MIXING_STEPS })
}

/// One row of a convergence trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub probs: Vec<f64>,
    pub l1_distance_to_steady: f64,
}

/// Distribution after each of `0..=steps` cycles and its L1 distance to the
/// steady state.
pub fn convergence_trace(
    t: &TransferMatrix,
    initial: &ProbabilityVector,
    steps: usize,
) -> FockResult<Vec<TraceRow>> {
    let pi = steady_state(t)?;
    let mut p = initial.clone();
    let mut rows = Vec::with_capacity(steps + 1);
    for step in 0..=steps {
        rows.push(TraceRow { step, probs: p.probs.clone(), l1_distance_to_steady: p.l1_distance(&pi) });
        if step < steps {
            p = t.apply(&p)?;
        }
    }
    Ok(rows)
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>) -> FockResult<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(FockError::InvalidDensityMatrix(format!(
                "shape {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm_err = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > DENSITY_TOLERANCE {
            return Err(FockError::InvalidDensityMatrix(format!("not Hermitian ({herm_err:.3e})")));
        }
        let trace = entries.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > DENSITY_TOLERANCE {
            return Err(FockError::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let hermitian = (&entries + entries.adjoint()) * C64::new(0.5, 0.0);
        let min_eig = SymmetricEigen::new(hermitian)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -DENSITY_TOLERANCE {
            return Err(FockError::InvalidDensityMatrix(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { entries })
    }

    /// `|psi><psi|` for a normalized amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> FockResult<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(FockError::ZeroNorm);
        }
        let v = v / C64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Largest elementwise `|a - b|`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn basis_matrix(basis: &SingleParticleUnitary) -> DMatrix<C64> {
    basis.matrix().to_dmatrix()
}

fn dephase_raw(rho: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let in_basis = b.adjoint() * rho * b;
    let diag = DMatrix::from_diagonal(&in_basis.diagonal());
    b * diag * b.adjoint()
}

/// Zeroes the off-diagonal elements of `rho` in the basis given by the
/// columns of `basis`.
pub fn dephase(rho: &DensityMatrix, basis: &SingleParticleUnitary) -> FockResult<DensityMatrix> {
    if rho.dim() != basis.dim() {
        return Err(FockError::DimensionMismatch { expected: rho.dim(), found: basis.dim() });
    }
    Ok(DensityMatrix { entries: dephase_raw(&rho.entries, &basis_matrix(basis)) })
}

/// Unitary step `rho -> V rho V^+` followed by dephasing in a second basis.
#[derive(Clone, Debug)]
pub struct CompetingChannel {
    step: DMatrix<C64>,
    basis: DMatrix<C64>,
}

impl CompetingChannel {
    pub fn new(step: &SingleParticleUnitary, basis: &SingleParticleUnitary) -> FockResult<Self> {
        if step.dim() != basis.dim() {
            return Err(FockError::DimensionMismatch { expected: step.dim(), found: basis.dim() });
        }
        Ok(Self { step: step.matrix().to_dmatrix(), basis: basis_matrix(basis) })
    }

    pub fn dim(&self) -> usize {
        self.step.nrows()
    }

    fn apply_raw(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        dephase_raw(&(&self.step * rho * self.step.adjoint()), &self.basis)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> FockResult<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(FockError::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        Ok(DensityMatrix { entries: self.apply_raw(&rho.entries) })
    }

    /// `d^2 x d^2` matrix acting on row-major flattened density matrices.
    pub fn superoperator(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut s = DMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let mut unit = DMatrix::zeros(d, d);
                unit[(a, b)] = C64::new(1.0, 0.0);
                let image = self.apply_raw(&unit);
                for i in 0..d {
                    for j in 0..d {
                        s[(i * d + j, a * d + b)] = image[(i, j)];
                    }
                }
            }
        }
        s
    }
}

/// Result of [`competing_channel_fixed_point`].
#[derive(Clone, Debug)]
pub struct FixedPointReport {
    /// Projection of the reference state `|0><0|` onto the fixed space; the
    /// fixed point itself when `multiplicity == 1`.
    pub state: DensityMatrix,
    /// Dimension of the channel's eigenvalue-1 eigenspace.
    pub multiplicity: usize,
    /// Smallest `|<e_i|b_j>|` between the eigenbasis of the unitary step and
    /// the dephasing basis.
    pub min_overlap: f64,
    /// Whether `min_overlap` exceeds [`OVERLAP_TOLERANCE`].
    pub overlap_condition: bool,
    /// Whether the step's eigenphases are pairwise distinct.
    pub nondegenerate_phases: bool,
    /// Largest elementwise distance of `state` from `I / dim`.
    pub distance_from_maximally_mixed: f64,
}

impl FixedPointReport {
    pub fn is_unique(&self) -> bool {
        self.multiplicity == 1
    }
}

/// Fixed point of `rho -> dephase(V rho V^+, basis)`.
///
/// The overlap condition and phase non-degeneracy are reported, not
/// enforced; the computation always runs.
pub fn competing_channel_fixed_point(
    hamiltonian_step: &SingleParticleUnitary,
    complementary_basis: &SingleParticleUnitary,
    dim: usize,
) -> FockResult<FixedPointReport> {
    for found in [hamiltonian_step.dim(), complementary_basis.dim()] {
        if found != dim {
            return Err(FockError::DimensionMismatch { expected: dim, found });
        }
    }
    let channel = CompetingChannel::new(hamiltonian_step, complementary_basis)?;

    let (eigvecs, schur_form) = Schur::new(channel.step.clone()).unpack();
    let phases: Vec<C64> = schur_form.diagonal().iter().copied().collect();
    let nondegenerate_phases = phases
        .iter()
        .enumerate()
        .all(|(i, a)| phases[i + 1..].iter().all(|b| (a - b).norm() > OVERLAP_TOLERANCE));
    let overlaps = eigvecs.adjoint() * &channel.basis;
    let min_overlap = overlaps.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);

    let d2 = dim * dim;
    let shifted = channel.superoperator() - DMatrix::<C64>::identity(d2, d2);
    let right = null_space(&shifted);
    let left = null_space(&shifted.adjoint());
    let multiplicity = right.len();
    if multiplicity == 0 || left.len() != multiplicity {
        return Err(FockError::InvalidArgument(format!(
            "channel has {} right and {} left fixed vectors",
            right.len(),
            left.len()
        )));
    }
    let r = DMatrix::from_columns(&right);
    let l = DMatrix::from_columns(&left);
    // spectral projector R (L^+ R)^-1 L^+ onto the eigenvalue-1 space
    let gram = l.adjoint() * &r;
    let gram_inv = gram.try_inverse().ok_or_else(|| {
        FockError::InvalidArgument("eigenvalue 1 is not semisimple".into())
    })?;
    let mut reference = DVector::zeros(d2);
    reference[0] = C64::new(1.0, 0.0);
    let fixed = &r * (gram_inv * (l.adjoint() * reference));

    let mut rho = DMatrix::from_fn(dim, dim, |i, j| fixed[i * dim + j]);
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let trace = rho.trace();
    rho /= trace;
    let state = DensityMatrix::new(rho)?;
    let distance_from_maximally_mixed = state.max_abs_diff(&DensityMatrix::maximally_mixed(dim));

    Ok(FixedPointReport {
        state,
        multiplicity,
        min_overlap,
        overlap_condition: min_overlap > OVERLAP_TOLERANCE,
        nondegenerate_phases,
        distance_from_maximally_mixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{beamsplitter, BeamsplitterSpec};

    fn labels() -> Vec<String> {
        vec!["same".into(), "diff".into()]
    }

    fn bunching_map() -> TransferMatrix {
        TransferMatrix::from_rows(labels(), &[vec![0.5, 1.0], vec![0.5, 0.0]]).unwrap()
    }

    #[test]
    fn transfer_from_balanced_splitter() {
        let t = derive_transfer_matrix(
            &beamsplitter(BeamsplitterSpec::balanced()),
            &CoarseGraining::same_vs_different(2, 2).unwrap(),
        )
        .unwrap();
        let expected = bunching_map();
        assert!((t.entries() - expected.entries()).amax() < 1e-12);
    }

    #[test]
    fn transfer_identity() {
        let t = derive_transfer_matrix(
            &SingleParticleUnitary::identity(3),
            &CoarseGraining::same_vs_different(3, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(t.entries(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn grading_validation() {
        let o = |v: &[usize]| OccupationVector::new(v.to_vec()).unwrap();
        let missing = CoarseGraining::new(
            "x",
            ParticleKind::Boson,
            2,
            2,
            vec![("a".into(), vec![o(&[2, 0])]), ("b".into(), vec![o(&[1, 1])])],
        );
        assert!(matches!(missing, Err(FockError::IncompletePartition(_))));
        let twice = CoarseGraining::new(
            "x",
            ParticleKind::Boson,
            2,
            2,
            vec![("a".into(), vec![o(&[2, 0]), o(&[0, 2])]), ("b".into(), vec![o(&[1, 1]), o(&[2, 0])])],
        );
        assert!(matches!(twice, Err(FockError::IncompletePartition(_))));
        let empty = CoarseGraining::new(
            "x",
            ParticleKind::Boson,
            2,
            2,
            vec![("a".into(), vec![o(&[2, 0]), o(&[0, 2]), o(&[1, 1])]), ("b".into(), vec![])],
        );
        assert!(matches!(empty, Err(FockError::IncompletePartition(_))));
        let grading = CoarseGraining::same_vs_different(2, 2).unwrap();
        assert!(matches!(
            derive_transfer_matrix(&SingleParticleUnitary::identity(3), &grading),
            Err(FockError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn steady_state_examples() {
        let pi = steady_state(&bunching_map()).unwrap();
        assert!((pi.probs()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((pi.probs()[1] - 1.0 / 3.0).abs() < 1e-12);

        let id = TransferMatrix::from_rows(labels(), &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(steady_state(&id).unwrap_err(), FockError::NonUniqueFixedPoint { multiplicity: 2 });

        let swap = TransferMatrix::from_rows(labels(), &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let pi = steady_state(&swap).unwrap();
        assert!((pi.probs()[0] - 0.5).abs() < 1e-15 && (pi.probs()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn transfer_validation() {
        assert!(TransferMatrix::from_rows(labels(), &[vec![0.5, 1.0], vec![0.6, 0.0]]).is_err());
        assert!(TransferMatrix::from_rows(labels(), &[vec![1.5, 1.0], vec![-0.5, 0.0]]).is_err());
        assert!(ProbabilityVector::new(labels(), vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(labels(), vec![-0.1, 1.1]).is_err());
        assert!(ProbabilityVector::new(labels(), vec![1.0]).is_err());
    }

    #[test]
    fn powers() {
        let t = bunching_map();
        assert_eq!(iterate_map(&t, 0).entries(), &DMatrix::identity(2, 2));
        assert_eq!(iterate_map(&t, 1).entries(), t.entries());
        let ten = iterate_map(&t, 10);
        let paper = [[0.667, 0.666], [0.333, 0.334]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((ten.get(i, j) - paper[i][j]).abs() < 5e-4);
            }
        }
    }

    #[test]
    fn mixing_examples() {
        let t = bunching_map();
        let start = ProbabilityVector::new(labels(), vec![0.0, 1.0]).unwrap();
        // L1 distance after k steps is (4/3) 2^-k
        assert_eq!(mixing_profile(&t, &start, 1e-3).unwrap(), 11);
        assert_eq!(mixing_profile(&t, &start, 2.0).unwrap(), 0);
        assert_eq!(mixing_profile(&t, &start, 1.0).unwrap(), 1);
        let pi = steady_state(&t).unwrap();
        assert_eq!(mixing_profile(&t, &pi, 1e-12).unwrap(), 0);
        assert!(mixing_profile(&t, &start, 0.0).is_err());

        let swap = TransferMatrix::from_rows(labels(), &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let corner = ProbabilityVector::new(labels(), vec![1.0, 0.0]).unwrap();
        assert!(matches!(mixing_profile(&swap, &corner, 0.5), Err(FockError::NotConverged { .. })));
    }

    #[test]
    fn trace_rows() {
        let start = ProbabilityVector::new(labels(), vec![0.0, 1.0]).unwrap();
        let rows = convergence_trace(&bunching_map(), &start, 3).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1].probs, vec![1.0, 0.0]);
        assert!((rows[3].l1_distance_to_steady - 4.0 / 3.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn dephase_examples() {
        let id = SingleParticleUnitary::identity(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let d = dephase(&plus, &id).unwrap();
        assert!((d.entries() - DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0))).camax() < 1e-15);
        let again = dephase(&d, &id).unwrap();
        assert!(again.max_abs_diff(&d) < 1e-15);
        // diagonal in the Fourier basis already
        let f = SingleParticleUnitary::fourier(2).unwrap();
        assert!(dephase(&plus, &f).unwrap().max_abs_diff(&plus) < 1e-15);
        assert!(dephase(&plus, &SingleParticleUnitary::identity(3)).is_err());
    }

    #[test]
    fn density_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(DensityMatrix::new(bad).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(neg).is_err());
        let nonherm = DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(0.1, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        assert!(DensityMatrix::new(nonherm).is_err());
    }

    #[test]
    fn fixed_point_two_level() {
        let v = SingleParticleUnitary::diagonal_phases(&[0.0, 1.0]).unwrap();
        let f = SingleParticleUnitary::fourier(2).unwrap();
        let report = competing_channel_fixed_point(&v, &f, 2).unwrap();
        assert_eq!(report.multiplicity, 1);
        assert!(report.overlap_condition && report.nondegenerate_phases);
        assert!(report.distance_from_maximally_mixed < 1e-9);

        let report = competing_channel_fixed_point(&v, &SingleParticleUnitary::identity(2), 2).unwrap();
        assert_eq!(report.multiplicity, 2);
        assert!(!report.overlap_condition);

        let flat = SingleParticleUnitary::diagonal_phases(&[0.0, 0.0]).unwrap();
        let report = competing_channel_fixed_point(&flat, &f, 2).unwrap();
        assert!(report.multiplicity > 1);
        assert!(!report.nondegenerate_phases);

        assert!(competing_channel_fixed_point(&v, &f, 3).is_err());
    }
}
