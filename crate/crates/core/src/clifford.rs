//! Pairwise anti-commuting, anti-Hermitian, unitary generator families of
//! size 2^a x 2^a, their ordered subset products, and the sign/commutation
//! predicates those products obey.

use crate::linalg::{Complex64, ComplexMatrix};

/// Largest supported family exponent (matrices up to 64x64).
pub const MAX_EXPONENT: u32 = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliffordError {
    #[error("family exponent must satisfy 1 <= a <= {MAX_EXPONENT}, got {0}")]
    UnsupportedExponent(u32),
    #[error("index {index} out of range for a family with {count} generators")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("indices must be strictly increasing and at least 1")]
    NotStrictlyIncreasing,
}

/// A family of 2a generators F_1..F_2a of size 2^a x 2^a satisfying
/// F_i^H = -F_i, F_i^H F_i = I and F_i F_k = -F_k F_i for i != k.
#[derive(Debug, Clone)]
pub struct CliffordFamily {
    a: u32,
    generators: Vec<ComplexMatrix>,
}

impl CliffordFamily {
    pub fn exponent(&self) -> u32 {
        self.a
    }

    /// Matrix size n = 2^a.
    pub fn dim(&self) -> usize {
        1usize << self.a
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// Generator F_i, 1-based.
    pub fn generator(&self, index: usize) -> Result<&ComplexMatrix, CliffordError> {
        if index == 0 || index > self.generators.len() {
            return Err(CliffordError::IndexOutOfRange {
                index,
                count: self.generators.len(),
            });
        }
        Ok(&self.generators[index - 1])
    }
}

/// Strictly increasing 1-based generator indices selecting an ordered product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self, CliffordError> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(CliffordError::NotStrictlyIncreasing);
            }
        }
        if indices.first().is_some_and(|&i| i == 0) {
            return Err(CliffordError::NotStrictlyIncreasing);
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self {
            indices: Vec::new(),
        }
    }

    /// Indices taken from the set bits of `mask` (bit b selects index b+1).
    pub fn from_mask(mask: usize) -> Self {
        let indices = (0..usize::BITS as usize)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| b + 1)
            .collect();
        Self { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn intersection_size(&self, other: &IndexSet) -> usize {
        self.indices
            .iter()
            .filter(|i| other.indices.contains(i))
            .count()
    }
}

fn sigma1() -> ComplexMatrix {
    let c = Complex64::new;
    ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(-1.0, 0.0), c(0.0, 0.0)],
    ])
}

fn sigma2() -> ComplexMatrix {
    let c = Complex64::new;
    ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(0.0, 1.0)],
        vec![c(0.0, 1.0), c(0.0, 0.0)],
    ])
}

fn sigma3() -> ComplexMatrix {
    let c = Complex64::new;
    ComplexMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)])
}

/// Deterministic family of 2a anti-commuting anti-Hermitian unitary
/// generators of size 2^a, built by iterated Kronecker extension: each step
/// appends diag(1,-1) to the existing generators and adjoins two fresh
/// off-diagonal blocks acting on the new factor.
pub fn clifford_generators(a: u32) -> Result<CliffordFamily, CliffordError> {
    if !(1..=MAX_EXPONENT).contains(&a) {
        return Err(CliffordError::UnsupportedExponent(a));
    }
    let mut generators = vec![sigma3(), sigma1()];
    let flip = ComplexMatrix::diag(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
    for level in 2..=a {
        let eye = ComplexMatrix::identity(1usize << (level - 1));
        let mut next: Vec<ComplexMatrix> = generators.iter().map(|f| f.kron(&flip)).collect();
        next.push(eye.kron(&sigma1()));
        next.push(eye.kron(&sigma2()));
        generators = next;
    }
    Ok(CliffordFamily { a, generators })
}

/// Odd-sized family: 2b+1 pairwise anti-commuting anti-Hermitian unitaries
/// of size 2^b. The extra element is the full product F_1..F_2b, scaled by j
/// when b is even so that it stays anti-Hermitian. For b = 0 this is the
/// single 1x1 matrix [j].
pub fn extended_generators(b: u32) -> Result<Vec<ComplexMatrix>, CliffordError> {
    if b == 0 {
        return Ok(vec![ComplexMatrix::diag(&[Complex64::new(0.0, 1.0)])]);
    }
    let family = clifford_generators(b)?;
    let mut out = family.generators().to_vec();
    let full = product_matrix(&family, &IndexSet::from_mask((1usize << (2 * b)) - 1))?;
    let extra = if b % 2 == 1 {
        full
    } else {
        full.scale(Complex64::new(0.0, 1.0))
    };
    out.push(extra);
    Ok(out)
}

/// Ordered product F_{i1} F_{i2} ... F_{is}; the empty set gives I_n.
pub fn product_matrix(
    family: &CliffordFamily,
    set: &IndexSet,
) -> Result<ComplexMatrix, CliffordError> {
    let mut acc = ComplexMatrix::identity(family.dim());
    for &i in set.indices() {
        acc = acc.matmul(family.generator(i)?);
    }
    Ok(acc)
}

/// Sign of the square of an ordered product of `s_len` distinct generators:
/// (-1)^(s(s+1)/2).
pub fn product_square_sign(s_len: u64) -> i32 {
    if (s_len * (s_len + 1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Whether the ordered products over `s1` and `s2` commute (they otherwise
/// anti-commute). With s = |s1|, r = |s2| and p = |s1 n s2|, the products
/// commute iff exactly one of these holds: r, s, p all odd; or rs even and
/// p even.
pub fn products_commute(s1: &IndexSet, s2: &IndexSet) -> bool {
    let s = s1.len();
    let r = s2.len();
    let p = s1.intersection_size(s2);
    let all_odd = r % 2 == 1 && s % 2 == 1 && p % 2 == 1;
    let even_case = (r * s).is_multiple_of(2) && p.is_multiple_of(2);
    all_odd ^ even_case
}

/// All 2^(2a) ordered subset products, including I_n, enumerated by subset
/// bitmask. They form a basis of the n x n complex matrices.
pub fn clifford_basis(family: &CliffordFamily) -> Vec<ComplexMatrix> {
    let count = 1usize << (2 * family.a);
    (0..count)
        .map(|mask| {
            product_matrix(family, &IndexSet::from_mask(mask)).expect("mask indices in range")
        })
        .collect()
}
