//! Group-decodable unitary weight designs: construction of the maximal-rate
//! 3- and 4-real-symbol decodable families, algebraic verification of their
//! decodability conditions, normalization, and symbol encoding.

use crate::clifford::{extended_generators, CliffordError};
use crate::linalg::{real_rank, tol, Complex64, ComplexMatrix};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UwdError {
    #[error("design parameter a must be at least 2, got {0}")]
    ExponentTooSmall(u32),
    #[error("symbols per group must be 2, 3 or 4, got {0}")]
    UnsupportedLambda(usize),
    #[error("design is not normalized (first weight is not the identity); call normalize() first")]
    NotNormalized,
    #[error("design fails verification: {0}")]
    InvalidDesign(String),
    #[error(
        "symbol vector shape {got_groups}x{got_lambda} does not match design {groups}x{lambda}"
    )]
    SymbolShapeMismatch {
        got_groups: usize,
        got_lambda: usize,
        groups: usize,
        lambda: usize,
    },
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// Exact rational number, always stored reduced with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        Self {
            num: sign * num / g,
            den: sign.abs() * den.abs() / g,
        }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A g-group, lambda-real-symbol unitary weight design on n x n matrices.
///
/// `weights[i][j]` is the weight matrix of group `i` (0-based) and symbol
/// `j+1` (the design's symbol indices are 1-based).
#[derive(Debug, Clone)]
pub struct WeightDesign {
    n: usize,
    groups: usize,
    lambda: usize,
    weights: Vec<Vec<ComplexMatrix>>,
}

impl WeightDesign {
    pub fn new(weights: Vec<Vec<ComplexMatrix>>) -> Result<Self, UwdError> {
        let groups = weights.len();
        if groups == 0 {
            return Err(UwdError::InvalidDesign("no groups".into()));
        }
        let lambda = weights[0].len();
        if !(2..=4).contains(&lambda) {
            return Err(UwdError::UnsupportedLambda(lambda));
        }
        let n = weights[0][0].rows();
        for row in &weights {
            if row.len() != lambda {
                return Err(UwdError::InvalidDesign("ragged weight table".into()));
            }
            for w in row {
                if w.rows() != n || w.cols() != n {
                    return Err(UwdError::InvalidDesign(
                        "weight matrices differ in size".into(),
                    ));
                }
            }
        }
        Ok(Self {
            n,
            groups,
            lambda,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Total number of real symbols K = g * lambda.
    pub fn symbol_count(&self) -> usize {
        self.groups * self.lambda
    }

    /// Weight matrix A_ij with 0-based group `i` and 1-based symbol index `j`.
    pub fn weight(&self, group: usize, index: usize) -> &ComplexMatrix {
        &self.weights[group][index - 1]
    }

    pub fn weight_rows(&self) -> &[Vec<ComplexMatrix>] {
        &self.weights
    }

    /// All K weight matrices in group-major order.
    pub fn all_weights(&self) -> Vec<ComplexMatrix> {
        self.weights.iter().flatten().cloned().collect()
    }
}

/// Real symbols x_ij addressed by (group, symbol) like the weight table.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector {
    values: Vec<Vec<f64>>,
}

impl SymbolVector {
    pub fn new(values: Vec<Vec<f64>>) -> Self {
        Self { values }
    }

    pub fn zeros(groups: usize, lambda: usize) -> Self {
        Self {
            values: vec![vec![0.0; lambda]; groups],
        }
    }

    /// Unit vector with x_ij = 1 (0-based group, 1-based symbol index).
    pub fn unit(groups: usize, lambda: usize, group: usize, index: usize) -> Self {
        let mut s = Self::zeros(groups, lambda);
        s.values[group][index - 1] = 1.0;
        s
    }

    pub fn groups(&self) -> usize {
        self.values.len()
    }

    pub fn lambda(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn get(&self, group: usize, index: usize) -> f64 {
        self.values[group][index - 1]
    }

    pub fn group_values(&self, group: usize) -> &[f64] {
        &self.values[group]
    }

    pub fn set_group(&mut self, group: usize, values: &[f64]) {
        self.values[group].copy_from_slice(values);
    }

    fn matches(&self, d: &WeightDesign) -> bool {
        self.groups() == d.groups() && self.values.iter().all(|g| g.len() == d.lambda())
    }
}

/// A codeword matrix together with the symbols that produced it.
#[derive(Debug, Clone)]
pub struct Codeword {
    pub matrix: ComplexMatrix,
    pub source: SymbolVector,
}

/// One verified condition: whether it held and the worst violation seen.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub ok: bool,
    pub max_violation: f64,
}

impl ConditionCheck {
    fn from_violation(max_violation: f64) -> Self {
        Self {
            ok: max_violation <= tol::STRUCT_EQ,
            max_violation,
        }
    }
}

/// Result of checking the defining conditions of a unitary weight design:
/// unit weights, inter-group orthogonality, and real linear independence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub unitarity: ConditionCheck,
    pub group_orthogonality: ConditionCheck,
    pub independence_ok: bool,
    pub rank: usize,
    pub expected_rank: usize,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.unitarity.ok && self.group_orthogonality.ok && self.independence_ok
    }
}

/// Result of checking the normalized-form conditions of a design whose first
/// weight is the identity: anti-Hermitian non-zero-group weights, zero-group
/// commutation, and cross-group anti-commutation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizedReport {
    pub anti_hermitian: ConditionCheck,
    pub zero_group_commutation: ConditionCheck,
    pub cross_group_anticommutation: ConditionCheck,
}

impl NormalizedReport {
    pub fn pass(&self) -> bool {
        self.anti_hermitian.ok
            && self.zero_group_commutation.ok
            && self.cross_group_anticommutation.ok
    }
}

/// Checks unitarity of every weight, the inter-group condition
/// A_{ij1}^H A_{kj2} + A_{kj2}^H A_{ij1} = 0 for i != k, and real linear
/// independence of all K weights.
pub fn verify_design(d: &WeightDesign) -> VerificationReport {
    let eye = ComplexMatrix::identity(d.n());
    let mut unit_violation = 0.0f64;
    for row in d.weight_rows() {
        for w in row {
            unit_violation = unit_violation.max(w.hermitian().matmul(w).max_abs_diff(&eye));
        }
    }

    let mut cross_violation = 0.0f64;
    for i in 0..d.groups() {
        for k in (i + 1)..d.groups() {
            for j1 in 1..=d.lambda() {
                for j2 in 1..=d.lambda() {
                    let a = d.weight(i, j1);
                    let b = d.weight(k, j2);
                    let s = &a.hermitian().matmul(b) + &b.hermitian().matmul(a);
                    cross_violation = cross_violation.max(s.max_abs_entry());
                }
            }
        }
    }

    let all = d.all_weights();
    let rank = real_rank(&all);
    VerificationReport {
        unitarity: ConditionCheck::from_violation(unit_violation),
        group_orthogonality: ConditionCheck::from_violation(cross_violation),
        independence_ok: rank == all.len(),
        rank,
        expected_rank: all.len(),
    }
}

/// Checks the normalized-form conditions. Requires A_01 = I_n.
pub fn verify_normalized(d: &WeightDesign) -> Result<NormalizedReport, UwdError> {
    let eye = ComplexMatrix::identity(d.n());
    if !d.weight(0, 1).approx_eq(&eye, tol::STRUCT_EQ) {
        return Err(UwdError::NotNormalized);
    }

    // Weights outside group 0 must be anti-Hermitian (equivalently square to -I).
    let mut ah_violation = 0.0f64;
    for i in 1..d.groups() {
        for j in 1..=d.lambda() {
            let w = d.weight(i, j);
            ah_violation = ah_violation.max((&w.hermitian() + w).max_abs_entry());
        }
    }

    // A_{0j1}^H A_{ij2} = A_{ij2} A_{0j1} for i >= 1.
    let mut zg_violation = 0.0f64;
    for j1 in 1..=d.lambda() {
        let a0 = d.weight(0, j1);
        let a0h = a0.hermitian();
        for i in 1..d.groups() {
            for j2 in 1..=d.lambda() {
                let w = d.weight(i, j2);
                let diff = &a0h.matmul(w) - &w.matmul(a0);
                zg_violation = zg_violation.max(diff.max_abs_entry());
            }
        }
    }

    // A_{ij1} A_{kj2} = -A_{kj2} A_{ij1} for 1 <= i != k.
    let mut cg_violation = 0.0f64;
    for i in 1..d.groups() {
        for k in (i + 1)..d.groups() {
            for j1 in 1..=d.lambda() {
                for j2 in 1..=d.lambda() {
                    let a = d.weight(i, j1);
                    let b = d.weight(k, j2);
                    let s = &a.matmul(b) + &b.matmul(a);
                    cg_violation = cg_violation.max(s.max_abs_entry());
                }
            }
        }
    }

    Ok(NormalizedReport {
        anti_hermitian: ConditionCheck::from_violation(ah_violation),
        zero_group_commutation: ConditionCheck::from_violation(zg_violation),
        cross_group_anticommutation: ConditionCheck::from_violation(cg_violation),
    })
}

/// Left-multiplies every weight by A_01^H, producing an equivalent design
/// whose first weight is the identity. The input must verify.
pub fn normalize(d: &WeightDesign) -> Result<WeightDesign, UwdError> {
    let report = verify_design(d);
    if !report.pass() {
        return Err(UwdError::InvalidDesign(format!(
            "cannot normalize: unitarity violation {:.2e}, orthogonality violation {:.2e}, rank {}/{}",
            report.unitarity.max_violation,
            report.group_orthogonality.max_violation,
            report.rank,
            report.expected_rank
        )));
    }
    let a01h = d.weight(0, 1).hermitian();
    let weights = d
        .weight_rows()
        .iter()
        .map(|row| row.iter().map(|w| a01h.matmul(w)).collect())
        .collect();
    WeightDesign::new(weights)
}

/// Rate of the design in complex symbols per channel use: K / (2n).
pub fn rate(d: &WeightDesign) -> Rational {
    Rational::new(d.symbol_count() as i64, 2 * d.n() as i64)
}

/// Maximum achievable rate of a lambda-real-symbol decodable design on
/// 2^a x 2^a matrices: a/2^(a-1) for lambda 2, 3(a-1)/2^a for lambda 3 and
/// (a-1)/2^(a-2) for lambda 4.
pub fn max_rate(a: u32, lambda: usize) -> Result<Rational, UwdError> {
    let pow = |e: u32| -> i64 { 1i64 << e };
    match lambda {
        2 => Ok(Rational::new(a as i64, pow(a - 1))),
        3 => Ok(Rational::new(3 * (a as i64 - 1), pow(a))),
        4 => Ok(Rational::new(a as i64 - 1, pow(a - 2))),
        other => Err(UwdError::UnsupportedLambda(other)),
    }
}

fn block_sign_pattern(signs: [f64; 4], m: usize) -> ComplexMatrix {
    let outer = ComplexMatrix::diag(
        &signs
            .iter()
            .map(|&s| Complex64::new(s, 0.0))
            .collect::<Vec<_>>(),
    );
    outer.kron(&ComplexMatrix::identity(m))
}

/// Builds the g = 2a-2 group, 4-real-symbol decodable design of size
/// n = 2^a. Group 0 holds the identity together with three +-1 block
/// diagonal matrices; group i >= 1 repeats an anti-commuting anti-Hermitian
/// unitary E_i along the diagonal and multiplies it into the group-0 row.
pub fn build_4rsd(a: u32) -> Result<WeightDesign, UwdError> {
    if a < 2 {
        return Err(UwdError::ExponentTooSmall(a));
    }
    let m = 1usize << (a - 2);
    let n = 4 * m;
    let e_family = extended_generators(a - 2)?;

    let a02 = block_sign_pattern([1.0, -1.0, 1.0, -1.0], m);
    let a03 = block_sign_pattern([1.0, 1.0, -1.0, -1.0], m);
    let a04 = block_sign_pattern([1.0, -1.0, -1.0, 1.0], m);
    let group0 = vec![
        ComplexMatrix::identity(n),
        a02.clone(),
        a03.clone(),
        a04.clone(),
    ];

    let mut weights = vec![group0];
    let eye4 = ComplexMatrix::identity(4);
    for e in &e_family {
        let ai1 = eye4.kron(e);
        weights.push(vec![
            ai1.clone(),
            a02.matmul(&ai1),
            a03.matmul(&ai1),
            a04.matmul(&ai1),
        ]);
    }
    WeightDesign::new(weights)
}

/// The 4-real-symbol design with the fourth symbol of every group removed:
/// a g = 2a-2 group, 3-real-symbol decodable design.
pub fn build_3rsd(a: u32) -> Result<WeightDesign, UwdError> {
    let four = build_4rsd(a)?;
    let weights = four
        .weight_rows()
        .iter()
        .map(|row| row[..3].to_vec())
        .collect();
    WeightDesign::new(weights)
}

/// The 4x4 two-group reference design: all weights diagonal, group 1 equal
/// to j times group 0.
pub fn example1_design() -> WeightDesign {
    let r = |x: f64| Complex64::new(x, 0.0);
    let a01 = ComplexMatrix::identity(4);
    let a02 = ComplexMatrix::diag(&[r(1.0), r(-1.0), r(1.0), r(-1.0)]);
    let a03 = ComplexMatrix::diag(&[r(1.0), r(1.0), r(-1.0), r(-1.0)]);
    let a04 = ComplexMatrix::diag(&[r(1.0), r(-1.0), r(-1.0), r(1.0)]);
    let j = Complex64::new(0.0, 1.0);
    let group0 = vec![a01.clone(), a02.clone(), a03.clone(), a04.clone()];
    let group1 = vec![a01.scale(j), a02.scale(j), a03.scale(j), a04.scale(j)];
    WeightDesign::new(vec![group0, group1]).expect("reference design is well formed")
}

/// The 8x8 four-group codeword pattern in the eight complex slots z_1..z_8.
/// Linear over the reals in (Re z, Im z).
fn example2_pattern(z: &[Complex64; 8]) -> ComplexMatrix {
    let c = |k: usize| z[k - 1];
    let s = |k: usize| z[k - 1].conj();
    let n = |v: Complex64| -v;
    ComplexMatrix::from_rows(&[
        vec![c(1), c(2), c(3), c(4), c(5), c(6), c(7), c(8)],
        vec![c(4), n(c(3)), n(c(2)), c(1), c(8), n(c(7)), n(c(6)), c(5)],
        vec![c(5), c(6), c(7), c(8), c(1), c(2), c(3), c(4)],
        vec![c(8), n(c(7)), n(c(6)), c(5), c(4), n(c(3)), n(c(2)), c(1)],
        vec![s(2), n(s(1)), s(4), n(s(3)), s(6), n(s(5)), s(8), n(s(7))],
        vec![s(3), s(4), n(s(1)), n(s(2)), s(7), s(8), n(s(5)), n(s(6))],
        vec![s(6), n(s(5)), s(8), n(s(7)), s(2), n(s(1)), s(4), n(s(3))],
        vec![s(7), s(8), n(s(5)), n(s(6)), s(3), s(4), n(s(1)), n(s(2))],
    ])
}

/// Slot and component (real/imaginary) that symbol x_ij occupies inside
/// z_1..z_8: groups 0 and 1 are the real and imaginary parts of slots
/// (1,4,5,8); groups 2 and 3 of slots (2,3,6,7).
const EXAMPLE2_SLOTS: [[usize; 4]; 4] = [[1, 4, 5, 8], [1, 4, 5, 8], [2, 3, 6, 7], [2, 3, 6, 7]];

fn example2_slot_value(group: usize, x: f64) -> Complex64 {
    if group == 0 || group == 2 {
        Complex64::new(x, 0.0)
    } else {
        Complex64::new(0.0, x)
    }
}

/// The 8x8 four-group reference design, with weight matrices probed from
/// the codeword pattern one unit symbol at a time.
pub fn example2_design() -> WeightDesign {
    let weights = (0..4)
        .map(|group| {
            (1..=4)
                .map(|j| {
                    let mut z = [Complex64::new(0.0, 0.0); 8];
                    z[EXAMPLE2_SLOTS[group][j - 1] - 1] = example2_slot_value(group, 1.0);
                    example2_pattern(&z)
                })
                .collect()
        })
        .collect();
    WeightDesign::new(weights).expect("reference design is well formed")
}

/// Codeword S = sum_ij x_ij A_ij.
pub fn encode(d: &WeightDesign, s: &SymbolVector) -> Result<Codeword, UwdError> {
    if !s.matches(d) {
        return Err(UwdError::SymbolShapeMismatch {
            got_groups: s.groups(),
            got_lambda: s.lambda(),
            groups: d.groups(),
            lambda: d.lambda(),
        });
    }
    let mut matrix = ComplexMatrix::zeros(d.n(), d.n());
    for i in 0..d.groups() {
        for j in 1..=d.lambda() {
            let x = s.get(i, j);
            if x != 0.0 {
                matrix = &matrix + &d.weight(i, j).scale(Complex64::new(x, 0.0));
            }
        }
    }
    Ok(Codeword {
        matrix,
        source: s.clone(),
    })
}

/// Codeword restricted to a single group: S_i = sum_j x_j A_ij.
pub fn encode_group(d: &WeightDesign, group: usize, values: &[f64]) -> ComplexMatrix {
    assert_eq!(values.len(), d.lambda(), "group symbol count mismatch");
    let mut matrix = ComplexMatrix::zeros(d.n(), d.n());
    for (j, &x) in values.iter().enumerate() {
        if x != 0.0 {
            matrix = &matrix + &d.weight(group, j + 1).scale(Complex64::new(x, 0.0));
        }
    }
    matrix
}
