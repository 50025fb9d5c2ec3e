//! Single-particle unitaries and their lift to many-particle Fock space.
//!
//! `U[(n, m)]` is the amplitude for a particle in mode `n` to leave in mode
//! `m`, i.e. the creation operator of input mode `n` maps to
//! `sum_m U[(n, m)] c_m^+`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{FockError, FockResult};
use crate::fock::{
    enumerate_basis, measurement_collapse, FockVector, OccupationVector, OutcomeDistribution,
    ParticleKind,
};
use crate::kernels::{amplitude_submatrix, determinant, permanent, ComplexMatrix};

/// Elementwise tolerance of the `U U^+ = I` check.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Tolerance on `t^2 + r^2 = 1`.
pub const BEAMSPLITTER_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleUnitary {
    matrix: ComplexMatrix,
}

impl SingleParticleUnitary {
    /// Checks squareness and unitarity.
    pub fn new(matrix: ComplexMatrix) -> FockResult<Self> {
        if !matrix.is_square() {
            return Err(FockError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        if matrix.rows() == 0 {
            return Err(FockError::InvalidArgument("unitary needs at least one mode".into()));
        }
        let deviation = (&matrix * &matrix.adjoint()).max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if deviation.is_nan() || deviation > UNITARITY_TOLERANCE {
            return Err(FockError::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n) }
    }

    /// Discrete Fourier transform `F[(j, k)] = exp(2 pi i j k / n) / sqrt(n)`.
    pub fn fourier(n: usize) -> FockResult<Self> {
        if n == 0 {
            return Err(FockError::InvalidArgument("Fourier unitary needs n >= 1".into()));
        }
        let norm = 1.0 / (n as f64).sqrt();
        Ok(Self {
            matrix: ComplexMatrix::from_fn(n, n, |j, k| {
                C64::from_polar(norm, 2.0 * PI * ((j * k) % n) as f64 / n as f64)
            }),
        })
    }

    /// `diag(exp(i phi_0), ..., exp(i phi_{n-1}))`.
    pub fn diagonal_phases(phases: &[f64]) -> FockResult<Self> {
        if phases.is_empty() {
            return Err(FockError::InvalidArgument("need at least one phase".into()));
        }
        let n = phases.len();
        Ok(Self {
            matrix: ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::from_polar(1.0, phases[i])
                } else {
                    C64::default()
                }
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.matrix[(n, m)]
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self * other` as matrices: apply `self` first, then `other`, in the
    /// row convention `|n> -> sum_m U_nm |m>`.
    pub fn then(&self, other: &SingleParticleUnitary) -> FockResult<Self> {
        if self.dim() != other.dim() {
            return Err(FockError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    /// Parses `{n, rows: [[[re, im], ...], ...]}` and checks unitarity.
    pub fn from_json(value: &serde_json::Value) -> FockResult<Self> {
        let repr: UnitaryRepr =
            serde_json::from_value(value.clone()).map_err(|e| FockError::Parse(e.to_string()))?;
        if repr.rows.len() != repr.n {
            return Err(FockError::DimensionMismatch { expected: repr.n, found: repr.rows.len() });
        }
        let rows: Vec<Vec<C64>> = repr
            .rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        let matrix = ComplexMatrix::from_rows(&rows)?;
        if matrix.cols() != repr.n {
            return Err(FockError::DimensionMismatch { expected: repr.n, found: matrix.cols() });
        }
        Self::new(matrix)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let repr = UnitaryRepr {
            n,
            rows: (0..n)
                .map(|i| self.matrix.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        };
        serde_json::to_value(repr).expect("plain data serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitaryRepr {
    n: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

/// Real transmission and reflection amplitudes of a lossless beamsplitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamsplitterSpec {
    t: f64,
    r: f64,
}

impl BeamsplitterSpec {
    pub fn new(t: f64, r: f64) -> FockResult<Self> {
        if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&r) {
            return Err(FockError::InvalidArgument(format!(
                "beamsplitter amplitudes must lie in [0, 1], got t={t}, r={r}"
            )));
        }
        if (t * t + r * r - 1.0).abs() > BEAMSPLITTER_TOLERANCE {
            return Err(FockError::InvalidArgument(format!(
                "t^2 + r^2 = {} is not 1",
                t * t + r * r
            )));
        }
        Ok(Self { t, r })
    }

    /// `t = r = 1/sqrt(2)`.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { t: h, r: h }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

impl Default for BeamsplitterSpec {
    fn default() -> Self {
        Self::balanced()
    }
}

/// `[[t, i r], [i r, t]]`: `a'^+ = t a^+ + i r b^+`, `b'^+ = t b^+ + i r a^+`.
pub fn beamsplitter(spec: BeamsplitterSpec) -> SingleParticleUnitary {
    let t = C64::new(spec.t, 0.0);
    let ir = C64::new(0.0, spec.r);
    SingleParticleUnitary {
        matrix: ComplexMatrix::new(2, 2, vec![t, ir, ir, t]).expect("2x2"),
    }
}

fn check_occupation(u: &SingleParticleUnitary, occ: &OccupationVector) -> FockResult<()> {
    if occ.num_modes() != u.dim() {
        return Err(FockError::DimensionMismatch { expected: u.dim(), found: occ.num_modes() });
    }
    Ok(())
}

/// Amplitude `<output| U_lifted |input>`.
///
/// Bosons: `per(S) / sqrt(prod n_i! prod m_j!)`; fermions: `det(S)` with rows
/// and columns in ascending mode order. `S` is the
/// [`amplitude_submatrix`](crate::kernels::amplitude_submatrix). Fermion
/// occupations above 1 are rejected with [`FockError::PauliExclusion`].
pub fn transition_amplitude(
    u: &SingleParticleUnitary,
    input_occ: &OccupationVector,
    output_occ: &OccupationVector,
    kind: ParticleKind,
) -> FockResult<C64> {
    check_occupation(u, input_occ)?;
    check_occupation(u, output_occ)?;
    input_occ.check_kind(kind)?;
    output_occ.check_kind(kind)?;
    let sub = amplitude_submatrix(&u.matrix, input_occ, output_occ)?;
    match kind {
        ParticleKind::Boson => {
            let norm = (input_occ.factorial_product() * output_occ.factorial_product()).sqrt();
            Ok(permanent(&sub)? / norm)
        }
        ParticleKind::Fermion => determinant(&sub),
    }
}

/// Same as [`transition_amplitude`], except that a doubly occupied fermion
/// occupation yields exactly zero instead of an error.
pub fn amplitude_or_pauli_zero(
    u: &SingleParticleUnitary,
    input_occ: &OccupationVector,
    output_occ: &OccupationVector,
    kind: ParticleKind,
) -> FockResult<C64> {
    match transition_amplitude(u, input_occ, output_occ, kind) {
        Err(FockError::PauliExclusion { .. }) => Ok(C64::default()),
        other => other,
    }
}

/// Applies the lifted unitary to a many-particle state.
pub fn evolve(u: &SingleParticleUnitary, state: &FockVector) -> FockResult<FockVector> {
    if state.num_modes() != u.dim() {
        return Err(FockError::DimensionMismatch { expected: u.dim(), found: state.num_modes() });
    }
    let kind = state.kind();
    let basis = enumerate_basis(kind, state.num_modes(), state.num_particles())?;
    let mut out = BTreeMap::new();
    for output in basis {
        let mut amp = C64::default();
        for (input, a) in state.terms() {
            amp += a * transition_amplitude(u, input, &output, kind)?;
        }
        out.insert(output, amp);
    }
    Ok(FockVector::from_parts(kind, state.num_modes(), state.num_particles(), out))
}

/// Matrix of transition amplitudes over the full basis, `[(out, in)]`, in
/// basis order.
pub fn lifted_matrix(
    u: &SingleParticleUnitary,
    kind: ParticleKind,
    num_particles: usize,
) -> FockResult<ComplexMatrix> {
    let basis = enumerate_basis(kind, u.dim(), num_particles)?;
    let d = basis.len();
    let mut m = ComplexMatrix::zeros(d, d);
    for (j, input) in basis.iter().enumerate() {
        for (i, output) in basis.iter().enumerate() {
            m[(i, j)] = transition_amplitude(u, input, output, kind)?;
        }
    }
    Ok(m)
}

/// Ratio of the probability that `M` bosons from distinct modes all leave in
/// `target_mode` to the same probability for independent classical particles,
/// `prod_i |U[(n_i, target)]|^2`. Equals `M!`.
pub fn bunching_enhancement(
    u: &SingleParticleUnitary,
    distinct_input_modes: &[usize],
    target_mode: usize,
) -> FockResult<f64> {
    let n = u.dim();
    if target_mode >= n {
        return Err(FockError::InvalidArgument(format!(
            "target mode {target_mode} out of range for {n} modes"
        )));
    }
    if distinct_input_modes.is_empty() {
        return Err(FockError::InvalidArgument("need at least one input mode".into()));
    }
    let mut counts = vec![0usize; n];
    for &m in distinct_input_modes {
        if m >= n {
            return Err(FockError::InvalidArgument(format!("mode index {m} out of range for {n} modes")));
        }
        counts[m] += 1;
        if counts[m] > 1 {
            return Err(FockError::InvalidArgument(format!(
                "input mode {m} repeated; the enhancement law needs distinct input modes"
            )));
        }
    }
    let input = OccupationVector::new(counts)?;
    let mut target = vec![0usize; n];
    target[target_mode] = distinct_input_modes.len();
    let output = OccupationVector::new(target)?;

    let classical: f64 = distinct_input_modes
        .iter()
        .map(|&m| u.get(m, target_mode).norm_sqr())
        .product();
    if classical == 0.0 {
        return Err(FockError::UndefinedRatio);
    }
    let quantum = transition_amplitude(u, &input, &output, ParticleKind::Boson)?.norm_sqr();
    Ok(quantum / classical)
}

/// Two-mode output statistics of bosons through a beamsplitter.
pub fn hom_distribution(
    spec: BeamsplitterSpec,
    input_occ: &OccupationVector,
) -> FockResult<OutcomeDistribution> {
    if input_occ.num_modes() != 2 {
        return Err(FockError::DimensionMismatch { expected: 2, found: input_occ.num_modes() });
    }
    let state = FockVector::basis_state(ParticleKind::Boson, input_occ.clone())?;
    let out = evolve(&beamsplitter(spec), &state)?;
    Ok(measurement_collapse(&out))
}
