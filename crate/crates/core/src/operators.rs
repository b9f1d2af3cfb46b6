//! Dense matrices typed as operators `ℓ_u^m → ℓ_v^n`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ascent::{best_of, AscentConfig};
use crate::enumerate::{gray, gray_chunks};
use crate::error::{Error, Result};
use crate::estimate::{NormEstimate, Witness};
use crate::exponent::Exponent;
use crate::norms::{dual_vector, linear_maximizer, normalize, p_norm};
use crate::random::{gaussian_vec, random_sign, seeded_rng, sub_seed};
use crate::scalar::Scalar;

/// Relative singular-value threshold for numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// An `rows × cols` real matrix viewed as `T: ℓ_u^cols → ℓ_v^rows`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc<T>", into = "MatrixDoc<T>", bound = "T: Scalar")]
pub struct MatrixOperator<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
    domain: Exponent,
    codomain: Exponent,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
enum EntriesDoc<T> {
    Flat(Vec<T>),
    Nested(Vec<Vec<T>>),
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct MatrixDoc<T> {
    rows: usize,
    cols: usize,
    domain_exp: Exponent,
    codomain_exp: Exponent,
    entries: EntriesDoc<T>,
}

impl<T: Scalar> TryFrom<MatrixDoc<T>> for MatrixOperator<T> {
    type Error = Error;

    fn try_from(doc: MatrixDoc<T>) -> Result<Self> {
        let entries = match doc.entries {
            EntriesDoc::Flat(v) => v,
            EntriesDoc::Nested(rows) => {
                if rows.len() != doc.rows {
                    return Err(Error::DimensionMismatch { expected: doc.rows, found: rows.len() });
                }
                rows.into_iter().flatten().collect()
            }
        };
        MatrixOperator::new(doc.rows, doc.cols, entries, doc.domain_exp, doc.codomain_exp)
    }
}

impl<T: Scalar> From<MatrixOperator<T>> for MatrixDoc<T> {
    fn from(m: MatrixOperator<T>) -> Self {
        MatrixDoc { rows: m.rows, cols: m.cols, domain_exp: m.domain, codomain_exp: m.codomain, entries: EntriesDoc::Flat(m.entries) }
    }
}

impl<T: Scalar> MatrixOperator<T> {
    /// `entries` is row-major.
    pub fn new(rows: usize, cols: usize, entries: Vec<T>, domain: Exponent, codomain: Exponent) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(MatrixOperator { rows, cols, entries, domain, codomain })
    }

    pub fn from_rows(rows: &[Vec<T>], domain: Exponent, codomain: Exponent) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Self::new(rows.len(), cols, rows.concat(), domain, codomain)
    }

    /// Builds the `rows × columns.len()` matrix whose columns are `columns`.
    pub fn from_columns(rows: usize, columns: &[Vec<T>], domain: Exponent, codomain: Exponent) -> Result<Self> {
        let cols = columns.len();
        let mut entries = vec![T::zero(); rows * cols];
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, v) in c.iter().enumerate() {
                entries[i * cols + j] = *v;
            }
        }
        Self::new(rows, cols, entries, domain, codomain)
    }

    pub fn identity(n: usize, e: Exponent) -> Self {
        inclusion(n, e, e)
    }

    pub fn zeros(rows: usize, cols: usize, domain: Exponent, codomain: Exponent) -> Self {
        MatrixOperator { rows, cols, entries: vec![T::zero(); rows * cols], domain, codomain }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> Exponent {
        self.domain
    }

    pub fn codomain(&self) -> Exponent {
        self.codomain
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == T::zero())
    }

    /// Same matrix between different spaces.
    pub fn retyped(&self, domain: Exponent, codomain: Exponent) -> Self {
        MatrixOperator { domain, codomain, ..self.clone() }
    }

    pub fn scaled(&self, factor: T) -> Self {
        MatrixOperator { entries: self.entries.iter().map(|v| *v * factor).collect(), ..self.clone() }
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[T]) -> Vec<T> {
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum()).collect()
    }

    /// `Tᵀ z`.
    pub fn apply_transpose(&self, z: &[T]) -> Result<Vec<T>> {
        if z.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: z.len() });
        }
        Ok(self.apply_transpose_unchecked(z))
    }

    pub(crate) fn apply_transpose_unchecked(&self, z: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (i, zi) in z.iter().enumerate() {
            if *zi == T::zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + *zi * *a;
            }
        }
        out
    }

    /// `self ∘ inner`: requires `inner`'s codomain to be `self`'s domain.
    pub fn compose(&self, inner: &MatrixOperator<T>) -> Result<Self> {
        if inner.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: inner.rows });
        }
        if inner.codomain != self.domain {
            return Err(Error::ExponentMismatch { left: self.domain.to_string(), right: inner.codomain.to_string() });
        }
        let mut entries = vec![T::zero(); self.rows * inner.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == T::zero() {
                    continue;
                }
                for j in 0..inner.cols {
                    entries[i * inner.cols + j] = entries[i * inner.cols + j] + a * inner.get(l, j);
                }
            }
        }
        Self::new(self.rows, inner.cols, entries, inner.domain, self.codomain)
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64_lossy())
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<T> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.to_dmatrix().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s.into_iter().map(T::of).collect()
    }

    /// Number of singular values above `RANK_THRESHOLD` times the largest.
    pub fn rank(&self) -> usize {
        let s = self.singular_values();
        let Some(top) = s.first().copied() else { return 0 };
        if top == T::zero() {
            return 0;
        }
        let thr = top * T::of(RANK_THRESHOLD);
        s.iter().filter(|v| **v > thr).count()
    }

    pub fn operator_norm(&self) -> NormEstimate<T> {
        self.operator_norm_with(&AscentConfig::default())
    }

    /// `‖T: ℓ_u^m → ℓ_v^n‖`.
    ///
    /// Exact when `u = 1` (column maximum), `v = ∞` (row maximum of dual norms),
    /// `u = v = 2` (largest singular value) or `u = ∞` with `m ≤ sign_cap`
    /// (enumeration of the cube's vertices). Otherwise a lower bound from
    /// multi-start nonlinear power iteration, which never decreases the ratio.
    pub fn operator_norm_with(&self, cfg: &AscentConfig) -> NormEstimate<T> {
        let (u, v) = (self.domain, self.codomain);
        if self.rows == 0 || self.cols == 0 {
            return NormEstimate::exact(T::zero(), "empty", None);
        }
        if u.is_one() {
            let (j, best) =
                (0..self.cols).map(|j| (j, p_norm(&self.column(j), v))).fold((0, -T::one()), |acc, c| if c.1 > acc.1 { c } else { acc });
            let mut x = vec![T::zero(); self.cols];
            x[j] = T::one();
            return NormEstimate::exact(best, "column-max", Some(Witness::Vector(x)));
        }
        if v.is_infinite() {
            let (i, best) =
                (0..self.rows)
                    .map(|i| (i, p_norm(self.row(i), u.conjugate())))
                    .fold((0, -T::one()), |acc, c| if c.1 > acc.1 { c } else { acc });
            let x = linear_maximizer(self.row(i), u);
            return NormEstimate::exact(best, "row-max", Some(Witness::Vector(x)));
        }
        if u.is_two() && v.is_two() {
            let svd = self.to_dmatrix().svd(false, true);
            let (k, top) = svd.singular_values.iter().enumerate().fold((0, -1.0), |acc, (k, s)| if *s > acc.1 { (k, *s) } else { acc });
            let x = svd.v_t.map(|vt| vt.row(k).iter().map(|a| T::of(*a)).collect::<Vec<T>>());
            return NormEstimate::exact(T::of(top), "svd", x.map(Witness::Vector));
        }
        if u.is_infinite() && self.cols <= cfg.sign_cap {
            let (best, x) = self.cube_vertex_max();
            return NormEstimate::exact(best, "sign-enumeration", Some(Witness::Vector(x)));
        }
        self.power_iteration_norm(cfg)
    }

    /// Maximum of `‖Tx‖_v` over `x ∈ {±1}^m` with `x_0 = +1`, by Gray code.
    fn cube_vertex_max(&self) -> (T, Vec<T>) {
        let m = self.cols;
        let v = self.codomain;
        let free = (m - 1) as u32;
        let cols = self.columns();
        let results: Vec<(T, u64)> = gray_chunks(free)
            .into_par_iter()
            .map(|(lo, hi)| {
                let code = gray(lo);
                let mut x: Vec<T> = (0..m).map(|i| if i > 0 && code >> (i - 1) & 1 == 1 { -T::one() } else { T::one() }).collect();
                let mut y = self.apply_unchecked(&x);
                let mut best = (p_norm(&y, v), lo);
                for step in lo + 1..hi {
                    let i = step.trailing_zeros() as usize + 1;
                    let two = x[i] + x[i];
                    for (yr, c) in y.iter_mut().zip(&cols[i]) {
                        *yr = *yr - two * *c;
                    }
                    x[i] = -x[i];
                    let val = p_norm(&y, v);
                    if val > best.0 {
                        best = (val, step);
                    }
                }
                best
            })
            .collect();
        let (val, step) = best_of(results, |r| r.0).unwrap_or((T::zero(), 0));
        let code = gray(step);
        let x = (0..m).map(|i| if i > 0 && code >> (i - 1) & 1 == 1 { -T::one() } else { T::one() }).collect();
        (val, x)
    }

    /// Nonlinear power iteration `x ← argmax_{‖x'‖_u≤1} ⟨Tᵀ J_v(Tx), x'⟩`
    /// from one start; returns the value and final point.
    pub(crate) fn power_from(&self, start: Vec<T>, cfg: &AscentConfig) -> (T, Vec<T>) {
        let (u, v) = (self.domain, self.codomain);
        let mut x = start;
        if normalize(&mut x, u) == T::zero() {
            return (T::zero(), x);
        }
        let mut y = self.apply_unchecked(&x);
        let mut val = p_norm(&y, v);
        let tol = T::of(cfg.tol);
        for _ in 0..cfg.iterations {
            let z = dual_vector(&y, v);
            let w = self.apply_transpose_unchecked(&z);
            if w.iter().all(|a| *a == T::zero()) {
                break;
            }
            let xn = linear_maximizer(&w, u);
            let yn = self.apply_unchecked(&xn);
            let vn = p_norm(&yn, v);
            if !(vn > val * (T::one() + tol)) {
                if vn > val {
                    x = xn;
                    val = vn;
                }
                break;
            }
            x = xn;
            y = yn;
            val = vn;
        }
        (val, x)
    }

    fn power_iteration_norm(&self, cfg: &AscentConfig) -> NormEstimate<T> {
        self.power_iteration_norm_with_starts(cfg, cfg.starts)
    }

    pub(crate) fn power_iteration_norm_with_starts(&self, cfg: &AscentConfig, random_starts: usize) -> NormEstimate<T> {
        let m = self.cols;
        // Basis starts guarantee at least the largest column norm.
        let mut starts: Vec<Vec<T>> = (0..m)
            .map(|j| {
                let mut e = vec![T::zero(); m];
                e[j] = T::one();
                e
            })
            .collect();
        for s in 0..random_starts {
            let mut rng = seeded_rng(sub_seed(cfg.seed, s as u64));
            starts.push(gaussian_vec(&mut rng, m));
        }
        let results: Vec<(T, Vec<T>)> = starts.into_par_iter().map(|s| self.power_from(s, cfg)).collect();
        let (val, x) = best_of(results, |r| r.0).unwrap_or((T::zero(), vec![T::zero(); m]));
        NormEstimate::lower(val, "power-iteration", T::of(cfg.tol), Some(Witness::Vector(x)))
    }

    /// Upper bound `‖(‖Te_j‖_v)_j‖_{u'}` on the operator norm (triangle + Hölder).
    pub fn column_norm_upper_bound(&self) -> T {
        let norms: Vec<T> = (0..self.cols).map(|j| p_norm(&self.column(j), self.codomain)).collect();
        p_norm(&norms, self.domain.conjugate())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

/// The diagonal operator `D_σ: ℓ_∞^k → ℓ_{q'}^k`, `τ ↦ Σ σ_i τ_i e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaDiagonal<T> {
    pub sigma: Vec<T>,
    pub target: Exponent,
}

impl<T: Scalar> SigmaDiagonal<T> {
    pub fn new(sigma: Vec<T>, target: Exponent) -> Self {
        SigmaDiagonal { sigma, target }
    }

    pub fn source(&self) -> Exponent {
        Exponent::INF
    }

    pub fn apply(&self, tau: &[T]) -> Vec<T> {
        self.sigma.iter().zip(tau).map(|(s, t)| *s * *t).collect()
    }

    pub fn to_operator(&self) -> MatrixOperator<T> {
        let k = self.sigma.len();
        let mut entries = vec![T::zero(); k * k];
        for (i, s) in self.sigma.iter().enumerate() {
            entries[i * k + i] = *s;
        }
        MatrixOperator { rows: k, cols: k, entries, domain: Exponent::INF, codomain: self.target }
    }
}

/// Canonical identity `ι: ℓ_u^m → ℓ_v^m`.
pub fn inclusion<T: Scalar>(m: usize, u: Exponent, v: Exponent) -> MatrixOperator<T> {
    let mut entries = vec![T::zero(); m * m];
    for i in 0..m {
        entries[i * m + i] = T::one();
    }
    MatrixOperator { rows: m, cols: m, entries, domain: u, codomain: v }
}

/// `n × m` matrix of independent uniform `±1` entries typed `ℓ_{q'}^m → ℓ_2^n`.
pub fn bennett_sample<T: Scalar>(m: usize, n: usize, qprime: Exponent, seed: u64) -> MatrixOperator<T> {
    let mut rng = seeded_rng(seed);
    let entries = (0..m * n).map(|_| random_sign(&mut rng)).collect();
    MatrixOperator { rows: n, cols: m, entries, domain: qprime, codomain: Exponent::TWO }
}

/// Among `tries` Bennett samples (seeds derived from `seed`), the one with the
/// largest `‖A: ℓ_{s'}^m → ℓ_2^n‖`; returns the sample (typed `ℓ_{q'}^m → ℓ_2^n`)
/// and that norm.
pub fn bennett_best_of<T: Scalar>(
    m: usize,
    n: usize,
    qprime: Exponent,
    s: Exponent,
    seed: u64,
    tries: usize,
    cfg: &AscentConfig,
) -> (MatrixOperator<T>, NormEstimate<T>) {
    let candidates: Vec<(MatrixOperator<T>, NormEstimate<T>)> = (0..tries.max(1))
        .map(|t| {
            let a = bennett_sample::<T>(m, n, qprime, sub_seed(seed, t as u64));
            let norm = a.retyped(s.conjugate(), Exponent::TWO).operator_norm_with(cfg);
            (a, norm)
        })
        .collect();
    best_of(candidates, |c| c.1.value).expect("at least one sample")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn hadamard2(u: &str, v: &str) -> MatrixOperator<f64> {
        MatrixOperator::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]], e(u), e(v)).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = MatrixOperator::<f64>::identity(2, e("2"));
        assert_eq!(id.apply(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(hadamard2("2", "2").apply(&[1.0, 1.0]).unwrap(), vec![2.0, 0.0]);
        let z = MatrixOperator::<f64>::zeros(2, 2, e("2"), e("2"));
        assert_eq!(z.apply(&[5.0, 7.0]).unwrap(), vec![0.0, 0.0]);
        assert!(id.apply(&[1.0]).is_err());
    }

    #[test]
    fn compose_examples() {
        let t = hadamard2("inf", "2");
        let id_in = MatrixOperator::<f64>::identity(2, e("inf"));
        let id_out = MatrixOperator::<f64>::identity(2, e("2"));
        assert_eq!(id_out.compose(&t).unwrap(), t);
        assert_eq!(t.compose(&id_in).unwrap(), t);
        let d = SigmaDiagonal::new(vec![1.0, 0.0], e("2")).to_operator();
        let c = d.compose(&id_in).unwrap();
        assert_eq!(c.entries(), &[1.0, 0.0, 0.0, 0.0]);
        assert!(t.compose(&id_out).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        let est = hadamard2("inf", "2").operator_norm();
        assert!(est.is_exact());
        assert!((est.value - 2.0).abs() < 1e-12);
        let d = SigmaDiagonal::new(vec![1.0, 1.0], e("2")).to_operator();
        assert!((d.operator_norm().value - 2f64.sqrt()).abs() < 1e-12);
        let id = MatrixOperator::<f64>::identity(5, e("2"));
        assert!((id.operator_norm().value - 1.0).abs() < 1e-12);
        assert_eq!(inclusion::<f64>(4, e("inf"), e("1")).operator_norm().value, 4.0);
    }

    #[test]
    fn exact_regimes_are_tagged() {
        let a = hadamard2("1", "3");
        assert_eq!(a.operator_norm().method, "column-max");
        assert_eq!(a.retyped(e("3"), e("inf")).operator_norm().method, "row-max");
        let lower = a.retyped(e("3"), e("3/2")).operator_norm();
        assert!(!lower.is_exact());
    }

    #[test]
    fn witnesses_attain_the_value() {
        let rows = vec![vec![0.3f64, -1.0, 2.0], vec![1.5, 0.2, -0.7]];
        for (u, v) in [("1", "2"), ("2", "2"), ("inf", "3"), ("3", "inf"), ("3", "3/2")] {
            let a = MatrixOperator::from_rows(&rows, e(u), e(v)).unwrap();
            let est = a.operator_norm();
            let x = est.vector().unwrap();
            let ratio = p_norm(&a.apply(x).unwrap(), e(v)) / p_norm(x, e(u));
            assert!((ratio - est.value).abs() <= 1e-9 * est.value, "{u}->{v}: {ratio} vs {}", est.value);
        }
    }

    #[test]
    fn power_iteration_is_sound_against_enumeration() {
        let rows = vec![vec![0.3, -1.0, 2.0, 0.1], vec![1.5, 0.2, -0.7, 1.1], vec![-0.4, 0.9, 0.5, 0.6]];
        let a = MatrixOperator::from_rows(&rows, e("inf"), e("3")).unwrap();
        let exact = a.operator_norm();
        let cfg = AscentConfig { sign_cap: 0, ..Default::default() };
        let lower = a.operator_norm_with(&cfg);
        assert!(!lower.is_exact());
        assert!(lower.value <= exact.value * (1.0 + 1e-12));
        assert!(lower.value >= exact.value * (1.0 - 1e-9));
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let a = MatrixOperator::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]], e("2"), e("2")).unwrap();
        assert_eq!(a.rank(), 1);
        assert_eq!(MatrixOperator::<f64>::zeros(2, 3, e("2"), e("2")).rank(), 0);
    }

    #[test]
    fn bennett_contract() {
        let a = bennett_sample::<f64>(4, 2, e("inf"), 7);
        assert_eq!((a.rows(), a.cols()), (2, 4));
        assert!(a.entries().iter().all(|v| *v == 1.0 || *v == -1.0));
        for c in a.columns() {
            assert!((p_norm(&c, e("2")) - 2f64.sqrt()).abs() < 1e-15);
        }
        assert_eq!(a, bennett_sample::<f64>(4, 2, e("inf"), 7));
        assert_ne!(bennett_sample::<f64>(8, 4, e("inf"), 7), bennett_sample::<f64>(8, 4, e("inf"), 8));
    }

    #[test]
    fn json_round_trip_and_nested_entries() {
        let a = hadamard2("inf", "4/3");
        let text = a.to_json();
        assert!(text.contains("\"domain_exp\":\"inf\""));
        assert!(text.contains("\"codomain_exp\":\"4/3\""));
        assert_eq!(MatrixOperator::<f64>::from_json(&text).unwrap(), a);
        let nested = r#"{"rows":2,"cols":2,"domain_exp":"inf","codomain_exp":"4/3","entries":[[1,1],[1,-1]]}"#;
        assert_eq!(MatrixOperator::<f64>::from_json(nested).unwrap(), a);
        assert!(MatrixOperator::<f64>::from_json(r#"{"rows":2,"cols":2,"domain_exp":"2","codomain_exp":"2","entries":[1]}"#).is_err());
    }
}
