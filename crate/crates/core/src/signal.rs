//! Rotated-lattice signal sets, the product-distance diversity criterion,
//! energy normalization, and coding-gain computation with both a closed form
//! and a brute-force oracle.

use crate::linalg::{eigvals_hermitian, tol, ComplexMatrix, LinalgError};
use crate::uwd::{encode_group, WeightDesign};

/// Sign patterns of the 4x4 Hadamard-type matrix P; also the coefficient
/// rows of the four product-distance factors.
pub const HADAMARD_ROWS: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// Orthogonal generator of the product-distance-optimized 4-dimensional
/// lattice, embedded to its published 4-decimal precision.
pub const LATTICE_GENERATOR: [[f64; 4]; 4] = [
    [-0.3664, -0.7677, 0.4231, 0.3121],
    [-0.2264, -0.4745, -0.6846, -0.5050],
    [-0.4745, 0.2264, -0.5050, 0.6846],
    [-0.7677, 0.3664, 0.3121, -0.4231],
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("signal set needs at least two distinct points, got {0}")]
    DegenerateSignalSet(usize),
    #[error("signal set has repeated points (indices {0} and {1})")]
    RepeatedPoint(usize, usize),
    #[error("signal set dimension {set} does not match design lambda {lambda}")]
    DimensionMismatch { set: usize, lambda: usize },
    #[error("codebook of size {size} exceeds the cap {cap}")]
    CodebookTooLarge { size: u128, cap: u128 },
    #[error("design does not have the four-symbol block-diagonal zero-group structure")]
    WrongDesignFamily,
    #[error("hadamard factor must have +-1 entries with P P^T = 4I")]
    BadHadamard,
    #[error("lattice generator is not orthogonal within {0}")]
    BadGenerator(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Difference of two signal points.
pub type DiffVector = [f64; 4];

/// The Hadamard-type factor P and the lattice generator G4 that together
/// rotate the integer lattice into a full-diversity signal set.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeRotation {
    pub hadamard: [[f64; 4]; 4],
    pub generator: [[f64; 4]; 4],
}

impl LatticeRotation {
    /// The published rotation: P as in [`HADAMARD_ROWS`], generator as in
    /// [`LATTICE_GENERATOR`].
    pub fn reference() -> Self {
        Self {
            hadamard: HADAMARD_ROWS,
            generator: LATTICE_GENERATOR,
        }
    }

    /// Checks the defining invariants: exact +-1 Hadamard rows with
    /// P P^T = 4I, and G4^T G4 = I within [`tol::LATTICE`] (the generator is
    /// only published to four decimals).
    pub fn validate(&self) -> Result<(), SignalError> {
        for row in &self.hadamard {
            for &e in row {
                if e != 1.0 && e != -1.0 {
                    return Err(SignalError::BadHadamard);
                }
            }
        }
        for r in 0..4 {
            for c in 0..4 {
                let dot: f64 = (0..4)
                    .map(|k| self.hadamard[r][k] * self.hadamard[c][k])
                    .sum();
                let expected = if r == c { 4.0 } else { 0.0 };
                if dot != expected {
                    return Err(SignalError::BadHadamard);
                }
            }
        }
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                let dot: f64 = (0..4)
                    .map(|k| self.generator[k][r] * self.generator[k][c])
                    .sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - expected).abs());
            }
        }
        if worst > tol::LATTICE {
            return Err(SignalError::BadGenerator(tol::LATTICE));
        }
        Ok(())
    }
}

fn mat4_vec(m: &[[f64; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for r in 0..4 {
        out[r] = (0..4).map(|c| m[r][c] * v[c]).sum();
    }
    out
}

/// A finite set of real symbol vectors used by every group of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    points: Vec<Vec<f64>>,
    energy_scale: f64,
}

impl SignalSet {
    pub fn from_points(points: Vec<Vec<f64>>, energy_scale: f64) -> Self {
        Self {
            points,
            energy_scale,
        }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn energy_scale(&self) -> f64 {
        self.energy_scale
    }

    /// Same point geometry scaled so the nominal energy becomes `e`.
    pub fn rescaled(&self, e: f64) -> Self {
        let factor = e / self.energy_scale;
        Self {
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|x| x * factor).collect())
                .collect(),
            energy_scale: e,
        }
    }

    fn ensure_usable(&self) -> Result<(), SignalError> {
        if self.len() < 2 {
            return Err(SignalError::DegenerateSignalSet(self.len()));
        }
        for i in 0..self.len() {
            for k in (i + 1)..self.len() {
                let dist: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[k])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if dist.sqrt() <= 1e-12 {
                    return Err(SignalError::RepeatedPoint(i, k));
                }
            }
        }
        Ok(())
    }
}

/// The 16-point rotated-lattice set x = e/4 * P * G4 * z over z in {+-1}^4.
///
/// Each point is scaled onto the sphere of radius exactly `e`: the published
/// generator is orthogonal only to its displayed precision, and downstream
/// energy normalization relies on every point carrying energy e^2.
pub fn rotated_signal_set(e: f64) -> SignalSet {
    let rot = LatticeRotation::reference();
    let mut points = Vec::with_capacity(16);
    for idx in 0..16u32 {
        let z: [f64; 4] = std::array::from_fn(|b| if idx & (1 << b) == 0 { 1.0 } else { -1.0 });
        let gu = mat4_vec(&rot.generator, &z);
        let raw = mat4_vec(&rot.hadamard, &gu); // P^{-1} = P/4
        let norm = raw.iter().map(|x| x * x / 16.0).sum::<f64>().sqrt();
        points.push(raw.iter().map(|x| x / 4.0 * (e / norm)).collect());
    }
    SignalSet::from_points(points, e)
}

/// Three-symbol companion set: the first three coordinates of the rotated
/// points obtained from zero-padded z in {+-1}^3. This extends the
/// four-symbol lattice recipe; no published prescription exists for the
/// three-symbol case.
pub fn rotated_signal_set_3d(e: f64) -> SignalSet {
    let rot = LatticeRotation::reference();
    let mut points = Vec::with_capacity(8);
    for idx in 0..8u32 {
        let z: [f64; 4] = std::array::from_fn(|b| {
            if b == 3 {
                0.0
            } else if idx & (1 << b) == 0 {
                1.0
            } else {
                -1.0
            }
        });
        let gu = mat4_vec(&rot.generator, &z);
        let raw = mat4_vec(&rot.hadamard, &gu);
        points.push(raw.iter().take(3).map(|x| x * e / 4.0).collect());
    }
    SignalSet::from_points(points, e)
}

/// Axis-aligned comparison set: the scaled hypercube (e/2) * {+-1}^4.
/// With e = 2 this is the plain {+-1}^4 set, which is not full diversity.
pub fn hypercube_signal_set(e: f64) -> SignalSet {
    let mut points = Vec::with_capacity(16);
    for idx in 0..16u32 {
        let z: Vec<f64> = (0..4)
            .map(|b| {
                if idx & (1 << b) == 0 {
                    e / 2.0
                } else {
                    -e / 2.0
                }
            })
            .collect();
        points.push(z);
    }
    SignalSet::from_points(points, e)
}

/// Product-distance factor of a difference vector: the fourth root of the
/// product of squared Hadamard-row sums, equivalently |prod_i (P dx)_i|^(1/2).
pub fn psi(dx: &DiffVector) -> f64 {
    let mut prod_sq = 1.0f64;
    for row in &HADAMARD_ROWS {
        let q: f64 = (0..4).map(|c| row[c] * dx[c]).sum();
        prod_sq *= q * q;
    }
    prod_sq.powf(0.25)
}

fn pad_diff(a: &[f64], b: &[f64]) -> DiffVector {
    let mut dx = [0.0; 4];
    for (i, slot) in dx.iter_mut().enumerate() {
        let av = a.get(i).copied().unwrap_or(0.0);
        let bv = b.get(i).copied().unwrap_or(0.0);
        *slot = av - bv;
    }
    dx
}

/// Outcome of the full-diversity test over all nonzero set differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityCheck {
    pub full_diversity: bool,
    pub min_psi: f64,
}

/// True iff psi stays above [`tol::PSI_POSITIVE`] over every difference of
/// distinct set points. Three-coordinate points are padded with a zero.
/// Vacuously true for sets with fewer than two points.
pub fn full_diversity_check(set: &SignalSet) -> DiversityCheck {
    let mut min_psi = f64::INFINITY;
    let pts = set.points();
    for i in 0..pts.len() {
        for k in (i + 1)..pts.len() {
            let dx = pad_diff(&pts[i], &pts[k]);
            min_psi = min_psi.min(psi(&dx));
        }
    }
    DiversityCheck {
        full_diversity: min_psi > tol::PSI_POSITIVE,
        min_psi,
    }
}

/// Minimum quarter-power product of G4 * dv over dv in {-2,0,2}^4 \ {0},
/// i.e. over all differences of sign vectors.
pub fn delta_u(rot: &LatticeRotation) -> f64 {
    let mut best = f64::INFINITY;
    for code in 0..81u32 {
        let mut dv = [0.0f64; 4];
        let mut c = code;
        for slot in &mut dv {
            *slot = match c % 3 {
                0 => 0.0,
                1 => 2.0,
                _ => -2.0,
            };
            c /= 3;
        }
        if dv == [0.0; 4] {
            continue;
        }
        let u = mat4_vec(&rot.generator, &dv);
        let prod_sq: f64 = u.iter().map(|x| x * x).product();
        best = best.min(prod_sq.powf(0.25));
    }
    best
}

/// Closed-form coding gain of the rotated-lattice construction: e^2 * delta_u.
pub fn coding_gain_closed_form(e: f64, rot: &LatticeRotation) -> f64 {
    e * e * delta_u(rot)
}

/// Average codeword energy per matrix entry at the set's own scale:
/// (1/n^2) sum_i mean_x ||S_i(x)||_F^2.
///
/// Assumes every group draws independently from `set` and that the set has
/// zero mean (true of the rotated-lattice and hypercube sets), which makes
/// the cross-group expectations vanish exactly.
pub fn average_codeword_energy(d: &WeightDesign, set: &SignalSet) -> Result<f64, SignalError> {
    if set.dim() != d.lambda() {
        return Err(SignalError::DimensionMismatch {
            set: set.dim(),
            lambda: d.lambda(),
        });
    }
    if set.is_empty() {
        return Err(SignalError::DegenerateSignalSet(0));
    }
    let n = d.n() as f64;
    let mut total = 0.0;
    for group in 0..d.groups() {
        let mut acc = 0.0;
        for p in set.points() {
            acc += encode_group(d, group, p).frobenius_norm_sq();
        }
        total += acc / set.len() as f64;
    }
    Ok(total / (n * n))
}

/// The energy scale e that makes the average codeword energy per matrix
/// entry equal to one when every group uses the rotated-lattice set at
/// scale e. Supports the three- and four-symbol designs.
pub fn energy_scale_for_unit_average(d: &WeightDesign) -> f64 {
    let unit_set = match d.lambda() {
        4 => rotated_signal_set(1.0),
        3 => rotated_signal_set_3d(1.0),
        other => panic!("no rotated-lattice set for lambda = {other}"),
    };
    let e1 = average_codeword_energy(d, &unit_set).expect("unit set matches design lambda");
    1.0 / e1.sqrt()
}

struct PairwiseGain {
    min_rank: usize,
    entries: Vec<(usize, f64)>, // (rank, product of nonzero eigenvalues)
}

impl PairwiseGain {
    fn new() -> Self {
        Self {
            min_rank: usize::MAX,
            entries: Vec::new(),
        }
    }

    fn push(&mut self, gram: &ComplexMatrix) -> Result<(), SignalError> {
        let eigs = eigvals_hermitian(gram)?;
        let lmax = eigs.last().copied().unwrap_or(0.0).max(1.0);
        let nonzero: Vec<f64> = eigs.into_iter().filter(|&l| l > tol::REL * lmax).collect();
        let rank = nonzero.len();
        let prod = nonzero.into_iter().product();
        self.min_rank = self.min_rank.min(rank);
        self.entries.push((rank, prod));
        Ok(())
    }

    fn gain(&self) -> f64 {
        let r = self.min_rank.max(1) as f64;
        self.entries
            .iter()
            .map(|&(_, prod)| prod.powf(1.0 / r))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Coding gain by direct minimization over single-group codeword
/// differences: the geometric mean of the nonzero eigenvalues of
/// (Delta S)^H (Delta S), minimized over all distinct point pairs in every
/// group. Single-group differences attain the overall minimum for the
/// block-structured designs; see [`coding_gain_exhaustive`] for the
/// unreduced search.
pub fn coding_gain_bruteforce(d: &WeightDesign, set: &SignalSet) -> Result<f64, SignalError> {
    set.ensure_usable()?;
    if set.dim() != d.lambda() {
        return Err(SignalError::DimensionMismatch {
            set: set.dim(),
            lambda: d.lambda(),
        });
    }
    let pts = set.points();
    let mut acc = PairwiseGain::new();
    for group in 0..d.groups() {
        for i in 0..pts.len() {
            for k in (i + 1)..pts.len() {
                let dx: Vec<f64> = pts[i].iter().zip(&pts[k]).map(|(a, b)| a - b).collect();
                let ds = encode_group(d, group, &dx);
                acc.push(&ds.hermitian().matmul(&ds))?;
            }
        }
    }
    Ok(acc.gain())
}

/// Coding gain over every pair of the full product codebook, without the
/// single-group reduction. Exponential in the group count; refuses
/// codebooks larger than `cap`.
pub fn coding_gain_exhaustive(
    d: &WeightDesign,
    set: &SignalSet,
    cap: u128,
) -> Result<f64, SignalError> {
    set.ensure_usable()?;
    if set.dim() != d.lambda() {
        return Err(SignalError::DimensionMismatch {
            set: set.dim(),
            lambda: d.lambda(),
        });
    }
    let size = (set.len() as u128).pow(d.groups() as u32);
    if size > cap {
        return Err(SignalError::CodebookTooLarge { size, cap });
    }
    let size = size as usize;
    let mut codewords = Vec::with_capacity(size);
    for mut index in 0..size {
        let mut cw = ComplexMatrix::zeros(d.n(), d.n());
        for group in 0..d.groups() {
            let point = &set.points()[index % set.len()];
            index /= set.len();
            cw = &cw + &encode_group(d, group, point);
        }
        codewords.push(cw);
    }
    let mut acc = PairwiseGain::new();
    for i in 0..codewords.len() {
        for k in (i + 1)..codewords.len() {
            let ds = &codewords[i] - &codewords[k];
            acc.push(&ds.hermitian().matmul(&ds))?;
        }
    }
    Ok(acc.gain())
}

fn has_4rsd_block_structure(d: &WeightDesign) -> bool {
    if d.lambda() != 4 || !d.n().is_multiple_of(4) {
        return false;
    }
    let m = d.n() / 4;
    let eye_m = ComplexMatrix::identity(m);
    let patterns = [
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    if !d
        .weight(0, 1)
        .approx_eq(&ComplexMatrix::identity(d.n()), tol::STRUCT_EQ)
    {
        return false;
    }
    for (j, pattern) in patterns.iter().enumerate() {
        let outer = ComplexMatrix::diag(
            &pattern
                .iter()
                .map(|&s| num_complex::Complex::new(s, 0.0))
                .collect::<Vec<_>>(),
        );
        if !d
            .weight(0, j + 2)
            .approx_eq(&outer.kron(&eye_m), tol::STRUCT_EQ)
        {
            return false;
        }
    }
    true
}

/// Closed-form determinant of (Delta S)^H (Delta S) for the block-structured
/// four-symbol designs: the product over the four Hadamard rows of
/// [sum_i (row . dx_i)^2]^(n/4), with one difference vector per group.
pub fn det_closed_form_4rsd(d: &WeightDesign, diffs: &[DiffVector]) -> Result<f64, SignalError> {
    if !has_4rsd_block_structure(d) {
        return Err(SignalError::WrongDesignFamily);
    }
    if diffs.len() != d.groups() {
        return Err(SignalError::DimensionMismatch {
            set: diffs.len(),
            lambda: d.groups(),
        });
    }
    let exponent = d.n() as f64 / 4.0;
    let mut det = 1.0;
    for row in &HADAMARD_ROWS {
        let factor: f64 = diffs
            .iter()
            .map(|dx| {
                let q: f64 = (0..4).map(|c| row[c] * dx[c]).sum();
                q * q
            })
            .sum();
        det *= factor.powf(exponent);
    }
    Ok(det)
}
