//! The "≥" direction of the quotient formula: an extreme contraction
//! `U = Σ e_j ⊗ g_j` (disjoint `±1` blocks) is rewritten as `τ` and `J`.

use crate::ascent::AscentConfig;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::p_norm;
use crate::operators::MatrixOperator;
use crate::scalar::Scalar;

/// Disjoint coordinate blocks of `0..m`, each coordinate carrying a sign `±1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedBlocks<T> {
    m: usize,
    blocks: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> SignedBlocks<T> {
    pub fn new(m: usize, blocks: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let mut used = vec![false; m];
        for (i, s) in blocks.iter().flatten() {
            if *i >= m {
                return Err(Error::InvalidParameter(format!("coordinate {i} outside 0..{m}")));
            }
            if used[*i] {
                return Err(Error::InvalidParameter(format!("coordinate {i} appears in two blocks")));
            }
            if s.abs() != T::one() {
                return Err(Error::InvalidParameter(format!("sign {s} is not +-1")));
            }
            used[*i] = true;
        }
        Ok(SignedBlocks { m, blocks })
    }

    /// Reads blocks off a family of disjointly supported `{0, ±1}` vectors.
    pub fn from_family(family: &VectorFamily<T>) -> Result<Self> {
        let blocks = family
            .vectors()
            .iter()
            .map(|g| g.iter().enumerate().filter(|(_, a)| **a != T::zero()).map(|(i, a)| (i, *a)).collect())
            .collect();
        Self::new(family.dim(), blocks)
    }

    pub fn blocks(&self) -> &[Vec<(usize, T)>] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// `g_j` as vectors of `ℓ_∞^m`.
    pub fn vectors(&self) -> Vec<Vec<T>> {
        self.blocks
            .iter()
            .map(|b| {
                let mut g = vec![T::zero(); self.m];
                for (i, s) in b {
                    g[*i] = *s;
                }
                g
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct MaureyReduction<T> {
    /// `τ_j = ‖D_σ g_j‖_{q'}` over the kept blocks.
    pub tau: Vec<T>,
    /// Columns `D_σ g_j / τ_j`, typed `ℓ_{q'}^{kept} → ℓ_{q'}^m`.
    pub j: MatrixOperator<T>,
    /// Indices of blocks with `D_σ g_j ≠ 0`.
    pub kept: Vec<usize>,
    pub j_norm: T,
    pub tau_norm: T,
    pub sigma_norm: T,
    /// `‖J‖ ≤ 1` and `‖τ‖_s ≤ ‖σ‖_s`, both up to `ε_num`.
    pub contract_holds: bool,
}

pub fn maurey_reduce<T: Scalar>(sigma: &[T], blocks: &SignedBlocks<T>, qprime: Exponent, s: Exponent) -> Result<MaureyReduction<T>> {
    let m = blocks.dim();
    if sigma.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: sigma.len() });
    }
    let mut tau = Vec::new();
    let mut kept = Vec::new();
    let mut columns = Vec::new();
    for (j, g) in blocks.vectors().into_iter().enumerate() {
        let d: Vec<T> = g.iter().zip(sigma).map(|(a, s)| *a * *s).collect();
        let t = p_norm(&d, qprime);
        if t == T::zero() {
            continue;
        }
        columns.push(d.iter().map(|a| *a / t).collect::<Vec<T>>());
        tau.push(t);
        kept.push(j);
    }
    let j = MatrixOperator::from_columns(m, &columns, qprime, qprime)?;
    let j_norm = j.operator_norm_with(&AscentConfig::default()).value;
    let tau_norm = p_norm(&tau, s);
    let sigma_norm = p_norm(sigma, s);
    let eps = T::eps_num();
    let contract_holds = j_norm <= T::one() + eps && tau_norm <= sigma_norm * (T::one() + eps) + eps;
    Ok(MaureyReduction { tau, j, kept, j_norm, tau_norm, sigma_norm, contract_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn singletons(m: usize) -> SignedBlocks<f64> {
        SignedBlocks::new(m, (0..m).map(|i| vec![(i, 1.0)]).collect()).unwrap()
    }

    #[test]
    fn reduction_examples() {
        let r = maurey_reduce(&[1.0, 1.0], &singletons(2), e("2"), e("2")).unwrap();
        assert_eq!(r.tau, vec![1.0, 1.0]);
        assert_eq!(r.j.entries(), MatrixOperator::<f64>::identity(2, e("2")).entries());
        assert!(r.contract_holds);

        let r = maurey_reduce(&[1.0, 0.0], &singletons(2), e("2"), e("2")).unwrap();
        assert_eq!(r.tau, vec![1.0]);
        assert_eq!(r.kept, vec![0]);
        assert_eq!((r.j.rows(), r.j.cols()), (2, 1));
        assert_eq!(r.j.column(0), vec![1.0, 0.0]);

        let s = 3.0f64;
        let c = 3f64.powf(-1.0 / s);
        let one_block = SignedBlocks::new(3, vec![vec![(0, 1.0), (1, 1.0), (2, 1.0)]]).unwrap();
        let r = maurey_reduce(&[c, c, c], &one_block, e("2"), e("3")).unwrap();
        assert!((r.tau[0] - 3f64.sqrt() * c).abs() < 1e-12);
        // s = 3 > q' = 2 lies outside the admissible range, so the contraction may fail.
        assert!(!r.contract_holds);
        let r = maurey_reduce(&[c, c, c], &one_block, e("3"), e("3")).unwrap();
        assert!(r.contract_holds);
    }

    #[test]
    fn blocks_must_be_disjoint_signs() {
        assert!(SignedBlocks::new(2, vec![vec![(0, 1.0)], vec![(0, -1.0)]]).is_err());
        assert!(SignedBlocks::new(2, vec![vec![(0, 0.5)]]).is_err());
        assert!(SignedBlocks::new(2, vec![vec![(2, 1.0)]]).is_err());
    }
}
