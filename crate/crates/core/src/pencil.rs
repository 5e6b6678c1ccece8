//! The diagonal pencil `<q_1, q_2>` with `q_1 = sum x_j^2`, `q_2 = sum lambda_j x_j^2`,
//! its degenerate members, the hyperelliptic branch data and the sign group.
//!
//! The pencil parameter is `t` with `q_t = t q_1 - q_2`, which corresponds to
//! `[a:b] = [t:-1]`. Degenerate members sit exactly at `t = lambda_j`.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::field::{dot, format_rational, parse_rational, rat, Field};
use crate::algebra::{Matrix, Poly, PolyMatrix, ProjParam, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilOfQuadrics {
    genus: usize,
    lambdas: Vec<Rational>,
}

impl PencilOfQuadrics {
    pub fn new(lambdas: Vec<Rational>) -> Result<Self> {
        let n = lambdas.len();
        if n < 6 || n % 2 == 1 {
            return Err(Error::WrongLength(n));
        }
        for i in 0..n {
            for j in i + 1..n {
                if lambdas[i] == lambdas[j] {
                    return Err(Error::DuplicateLambda {
                        i,
                        j,
                        value: format_rational(&lambdas[i]),
                    });
                }
            }
        }
        Ok(PencilOfQuadrics {
            genus: n / 2 - 1,
            lambdas,
        })
    }

    /// `lambda = (0, 1, ..., 2g+1)`.
    pub fn canonical(genus: usize) -> Result<Self> {
        Self::new((0..2 * genus as i64 + 2).map(rat).collect())
    }

    pub fn parse(lambdas: &[impl AsRef<str>]) -> Result<Self> {
        Self::new(
            lambdas
                .iter()
                .map(|s| parse_rational(s.as_ref()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of homogeneous coordinates, `2g + 2`.
    pub fn ambient_dim(&self) -> usize {
        self.lambdas.len()
    }

    /// Index of the last coordinate, `2g + 1`; `Y` is cut out by `x_last = 0`.
    pub fn last(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[Rational] {
        &self.lambdas
    }

    pub fn lambda<F: Field>(&self, j: usize) -> F {
        F::from_rational(&self.lambdas[j])
    }

    pub fn lambdas_in<F: Field>(&self) -> Vec<F> {
        self.lambdas.iter().map(F::from_rational).collect()
    }

    pub fn max_lambda(&self) -> &Rational {
        self.lambdas.iter().max().expect("nonempty")
    }

    pub fn q1<F: Field>(&self, x: &[F]) -> F {
        dot(x, x)
    }

    pub fn q2<F: Field>(&self, x: &[F]) -> F {
        x.iter()
            .zip(&self.lambdas)
            .fold(F::zero(), |acc, (xi, l)| {
                acc + F::from_rational(l) * xi.clone() * xi.clone()
            })
    }

    /// The covectors `q_1(x, .)` and `q_2(x, .)` (without the factor 2).
    pub fn polar_covectors<F: Field>(&self, x: &[F]) -> [Vec<F>; 2] {
        let g1 = x.to_vec();
        let g2 = x
            .iter()
            .zip(&self.lambdas)
            .map(|(xi, l)| F::from_rational(l) * xi.clone())
            .collect();
        [g1, g2]
    }

    /// The `2 x (2g+2)` matrix with rows `q_1(x, .)`, `q_2(x, .)`.
    pub fn polar_rows<F: Field>(&self, x: &[F]) -> Matrix<F> {
        let [g1, g2] = self.polar_covectors(x);
        Matrix::from_rows(vec![g1, g2]).expect("rows have equal length")
    }

    /// Gram matrix of `q_t = t q_1 - q_2`: `diag(t - lambda_k)`.
    pub fn gram<F: Field>(&self, t: &F) -> Matrix<F> {
        let d: Vec<F> = self
            .lambdas
            .iter()
            .map(|l| t.clone() - F::from_rational(l))
            .collect();
        Matrix::diagonal(&d)
    }

    /// Gram matrix with `t` kept symbolic.
    pub fn gram_symbolic(&self) -> PolyMatrix<Rational> {
        let n = self.ambient_dim();
        let mut entries = vec![Poly::zero(); n * n];
        for (k, l) in self.lambdas.iter().enumerate() {
            entries[k * n + k] = Poly::linear_root(l.clone());
        }
        PolyMatrix::new(n, n, entries).expect("square")
    }

    /// `det(gram(t)) = prod_k (t - lambda_k)`.
    pub fn discriminant_poly(&self) -> Poly<Rational> {
        self.lambdas
            .iter()
            .fold(Poly::constant(rat(1)), |acc, l| acc.mul(&Poly::linear_root(l.clone())))
    }

    /// The degenerate members `t = lambda_j` with their kernels.
    pub fn degenerate_parameters(&self) -> Result<Vec<DegenerateMember>> {
        self.lambdas
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let kernel = crate::algebra::nullspace_exact(&self.gram(l))?;
                Ok(DegenerateMember {
                    index: j,
                    parameter: l.clone(),
                    kernel,
                })
            })
            .collect()
    }

    pub fn hyperelliptic(&self) -> HyperellipticData {
        HyperellipticData {
            genus: self.genus,
            branch_params: self
                .lambdas
                .iter()
                .map(|l| ProjParam::from_pencil_chart(l.clone()))
                .collect(),
            weierstrass_labels: (0..self.ambient_dim()).collect(),
        }
    }

    /// Short stable digest of the coefficients, used to tag derived data.
    pub fn fingerprint(&self) -> String {
        let joined = self
            .lambdas
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(",");
        let digest = Sha256::digest(joined.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> PencilJson {
        PencilJson {
            lambdas: self.lambdas.iter().map(format_rational).collect(),
        }
    }
}

impl fmt::Display for PencilOfQuadrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ls: Vec<String> = self.lambdas.iter().map(format_rational).collect();
        write!(f, "pencil(g={}, lambda=[{}])", self.genus, ls.join(", "))
    }
}

/// `{"lambdas": ["0","1","2","3","4","5"]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilJson {
    pub lambdas: Vec<String>,
}

impl TryFrom<&PencilJson> for PencilOfQuadrics {
    type Error = Error;
    fn try_from(j: &PencilJson) -> Result<Self> {
        PencilOfQuadrics::parse(&j.lambdas)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateMember {
    pub index: usize,
    pub parameter: Rational,
    pub kernel: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperellipticData {
    pub genus: usize,
    /// `r_j = [lambda_j : -1]`
    pub branch_params: Vec<ProjParam<Rational>>,
    pub weierstrass_labels: Vec<usize>,
}

/// An element of `(Z/2)^{2g+2}` modulo the all-ones vector.
///
/// Stored as the representative whose lowest set bit comes first, i.e. the
/// one with bit 0 set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignGroupElement {
    bits: Vec<bool>,
}

impl SignGroupElement {
    pub fn new(mut bits: Vec<bool>) -> Self {
        if !bits.first().copied().unwrap_or(true) {
            bits.iter_mut().for_each(|b| *b = !*b);
        }
        SignGroupElement { bits }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![false; n])
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Parity of the number of flipped signs; complement-invariant since the
    /// length is even.
    pub fn is_even(&self) -> bool {
        self.bits.iter().filter(|&&b| b).count() % 2 == 0
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::new(self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect())
    }

    /// Flips the sign of every coordinate whose bit is set.
    pub fn act<F: Field>(&self, x: &[F]) -> Result<Vec<F>> {
        if x.len() != self.bits.len() {
            return Err(Error::DimensionMismatch {
                expected: self.bits.len(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.bits)
            .map(|(xi, &b)| if b { -xi.clone() } else { xi.clone() })
            .collect())
    }
}

impl fmt::Display for SignGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// All `2^{2g+1}` elements of the sign group.
pub fn sign_group_elements(p: &PencilOfQuadrics) -> Vec<SignGroupElement> {
    let n = p.ambient_dim();
    (0u64..1 << (n - 1))
        .map(|m| {
            let mut bits = vec![true];
            bits.extend((0..n - 1).map(|i| m >> i & 1 == 1));
            SignGroupElement::new(bits)
        })
        .collect()
}

/// The index-two subgroup of even sign changes.
pub fn even_sign_group_elements(p: &PencilOfQuadrics) -> Vec<SignGroupElement> {
    sign_group_elements(p)
        .into_iter()
        .filter(SignGroupElement::is_even)
        .collect()
}
