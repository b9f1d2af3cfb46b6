use rayon::prelude::*;

use super::maurey::{maurey_reduce, SignedBlocks};
use super::{InequalityReport, QuotientInstance};
use crate::ascent::{best_of, AscentConfig};
use crate::error::Result;
use crate::estimate::{BoundKind, NormEstimate, Witness};
use crate::exponent::Exponent;
use crate::family::VectorFamily;
use crate::norms::{argmax_abs, p_norm};
use crate::operators::{MatrixOperator, SigmaDiagonal};
use crate::random::{gaussian_vec, seeded_rng, sphere_point, sub_seed};
use crate::scalar::Scalar;
use crate::summing::{pi_estimate, pi_p1, strong_norm, weak_norm_with, SummingParams};

/// `V = Σ e_j ⊗ x_j : ℓ_{q'}^k → ℓ_u^m` and the Hölder-equality weights `σ`.
#[derive(Clone, Debug)]
pub struct QuotientCertificate<T> {
    pub v: MatrixOperator<T>,
    pub sigma: Vec<T>,
}

/// Builds `(V, σ)` with `(Σ‖Tx_j‖^p)^{1/p} = (Σ(|σ_j|‖Tx_j‖)^r)^{1/r}`,
/// `‖σ‖_s = 1`: `σ_j ∝ ‖Tx_j‖^{p/s}` (all ones for `s = ∞`, a unit vector at
/// the largest image for `p = ∞`, and `e_1` when every image vanishes).
pub fn quotient_certificate<T: Scalar>(
    family: &VectorFamily<T>,
    op: &MatrixOperator<T>,
    p: Exponent,
    q: Exponent,
    s: Exponent,
) -> Result<QuotientCertificate<T>> {
    let norms: Vec<T> = family.images(op)?.iter().map(|y| p_norm(y, op.codomain())).collect();
    let k = norms.len();
    let unit = |j: usize| {
        let mut e = vec![T::zero(); k];
        e[j] = T::one();
        e
    };
    let sigma = if norms.iter().all(|a| *a == T::zero()) {
        unit(0)
    } else if s.is_infinite() {
        vec![T::one(); k]
    } else if p.is_infinite() {
        unit(argmax_abs(&norms).unwrap_or(0))
    } else {
        let expo = p.value::<T>() / s.value::<T>();
        let mut w: Vec<T> = norms.iter().map(|a| a.powf(expo)).collect();
        let n = p_norm(&w, s);
        w.iter_mut().for_each(|a| *a = *a / n);
        w
    };
    Ok(QuotientCertificate { v: family.column_operator(q), sigma })
}

#[derive(Clone, Debug)]
pub struct QuotientOptions {
    /// Random `(V, σ)` pairs beyond the certificate.
    pub candidates: usize,
    pub seed: u64,
    /// Relative gap allowed between the two sides.
    pub equality_tol: f64,
    /// Relative slack for the sound direction.
    pub sound_tol: f64,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions { candidates: 16, seed: 0, equality_tol: 0.05, sound_tol: 1e-6 }
    }
}

/// One evaluated pair `(V, σ)`.
#[derive(Clone, Debug)]
pub struct CandidateOutcome<T> {
    /// `π_{r1}^k(T V D_σ)`.
    pub value: T,
    pub value_kind: BoundKind,
    /// `value ≤ (1 + sound_tol)·lhs`.
    pub sound: bool,
    /// `S_p/w_q` of the family `x_j = V J e_j` obtained from the witness.
    pub transfer_bound: Option<T>,
    /// `value ≤ S_p(x)·‖τ‖_s` and `w_q(x) ≤ 1`, the two steps of the "≥" proof.
    pub transfer_holds: bool,
}

#[derive(Clone, Debug)]
pub struct QuotientEvaluation<T> {
    /// `π_pq^k(T)`.
    pub lhs: NormEstimate<T>,
    pub certificate: Option<QuotientCertificate<T>>,
    /// `(Σ(|σ_j|‖Tx_j‖)^r)^{1/r}` of the certificate, equal to the strong norm of the `lhs` witness.
    pub certificate_value: T,
    /// Best lower bound for the supremum over `(V, σ)`.
    pub rhs: NormEstimate<T>,
    /// The certificate pair first, then the random pairs.
    pub candidates: Vec<CandidateOutcome<T>>,
}

fn evaluate_pair<T: Scalar>(
    inst: &QuotientInstance<T>,
    v: &MatrixOperator<T>,
    sigma: &[T],
    lhs: T,
    opts: &QuotientOptions,
    cfg: &AscentConfig,
) -> Result<(CandidateOutcome<T>, NormEstimate<T>)> {
    let d = SigmaDiagonal::new(sigma.to_vec(), inst.q.conjugate()).to_operator();
    let tvd = inst.op.compose(v)?.compose(&d)?;
    let est = pi_p1(&tvd, inst.r, inst.k, cfg)?;
    let tol = T::of(opts.sound_tol);
    let eps = T::eps_num();
    let mut outcome = CandidateOutcome {
        value: est.value,
        value_kind: est.kind,
        sound: est.value <= lhs * (T::one() + tol) + eps,
        transfer_bound: None,
        transfer_holds: false,
    };
    let blocks = est.family().and_then(|f| SignedBlocks::from_family(f).ok());
    if let Some(blocks) = blocks {
        let red = maurey_reduce(sigma, &blocks, inst.q.conjugate(), inst.s)?;
        let vj = v.compose(&red.j)?;
        if vj.cols() == 0 {
            outcome.transfer_holds = est.value <= eps;
        } else {
            let fam = VectorFamily::from_columns(&vj);
            let sp = strong_norm(&fam, &inst.op, inst.p)?;
            let w = weak_norm_with(&fam, inst.q, cfg);
            let w_bound = if w.is_exact() { w.value } else { fam.column_operator(inst.q).column_norm_upper_bound() };
            outcome.transfer_bound = Some(if w_bound > T::zero() { sp / w_bound } else { T::zero() });
            let slack = T::one() + T::of(1e-9);
            outcome.transfer_holds = est.value <= sp * red.tau_norm * slack + eps && w_bound <= slack && red.contract_holds;
        }
    }
    Ok((outcome, est))
}

fn contraction<T: Scalar>(inst: &QuotientInstance<T>, idx: u64, seed: u64, cfg: &AscentConfig) -> Option<(MatrixOperator<T>, Vec<T>)> {
    let (m, k) = (inst.op.cols(), inst.k);
    let mut rng = seeded_rng(sub_seed(seed, idx));
    let g = MatrixOperator::<T>::new(m, k, gaussian_vec(&mut rng, m * k), inst.q.conjugate(), inst.op.domain()).ok()?;
    let est = g.operator_norm_with(cfg);
    let norm = if est.is_exact() { est.value } else { g.column_norm_upper_bound() };
    if !(norm > T::zero()) {
        return None;
    }
    let sigma = sphere_point(&mut rng, k, inst.s);
    Some((g.scaled(norm.recip()), sigma))
}

/// Lower bound for `sup{ π_{r1}^k(T V D_σ) : ‖V‖, ‖σ‖_s ≤ 1 }` from the
/// certificate of the best `π_pq^k` witness and `opts.candidates` random pairs
/// (`V` Gaussian rescaled to norm 1, `σ` on the `ℓ_s` sphere).
pub fn quotient_rhs<T: Scalar>(inst: &QuotientInstance<T>, opts: &QuotientOptions, cfg: &AscentConfig) -> Result<QuotientEvaluation<T>> {
    let lhs = pi_estimate(&inst.op, SummingParams::new(inst.p, inst.q, inst.k)?, cfg)?;
    let mut pairs: Vec<(MatrixOperator<T>, Vec<T>)> = Vec::new();
    let mut certificate = None;
    let mut certificate_value = T::zero();
    if let Some(f) = lhs.family().filter(|f| !f.is_empty()) {
        let cert = quotient_certificate(f, &inst.op, inst.p, inst.q, inst.s)?;
        let norms: Vec<T> = f.images(&inst.op)?.iter().map(|y| p_norm(y, inst.op.codomain())).collect();
        let weighted: Vec<T> = norms.iter().zip(&cert.sigma).map(|(a, s)| *a * s.abs()).collect();
        certificate_value = p_norm(&weighted, inst.r);
        pairs.push((cert.v.clone(), cert.sigma.clone()));
        certificate = Some(cert);
    }
    pairs.extend((0..opts.candidates as u64).filter_map(|i| contraction(inst, i, opts.seed, cfg)));
    let evaluated: Vec<(CandidateOutcome<T>, NormEstimate<T>)> =
        pairs.par_iter().map(|(v, sigma)| evaluate_pair(inst, v, sigma, lhs.value, opts, cfg)).collect::<Result<_>>()?;
    let candidates: Vec<CandidateOutcome<T>> = evaluated.iter().map(|(c, _)| c.clone()).collect();
    let best = best_of(evaluated, |(c, _)| c.value);
    let mut rhs = match best {
        Some((_, est)) => NormEstimate::lower(est.value, "quotient-candidates", T::of(cfg.tol), est.witness),
        None => NormEstimate::lower(T::zero(), "quotient-candidates", T::of(cfg.tol), None),
    };
    if certificate_value > rhs.value {
        let basis = certificate.as_ref().map(|c| VectorFamily::basis(c.sigma.len(), Exponent::INF));
        rhs = NormEstimate::lower(certificate_value, "quotient-certificate", T::of(cfg.tol), basis.map(Witness::Family));
    }
    Ok(QuotientEvaluation { lhs, certificate, certificate_value, rhs, candidates })
}

#[derive(Clone, Debug)]
pub struct QuotientVerification<T> {
    /// `holds` is the equality check `|lhs − rhs| ≤ equality_tol·max(lhs, rhs)`.
    pub report: InequalityReport<T>,
    /// Every candidate satisfies `value ≤ (1 + sound_tol)·lhs`.
    pub sound: bool,
    pub violations: usize,
    pub evaluation: QuotientEvaluation<T>,
}

pub fn quotient_verify<T: Scalar>(
    inst: &QuotientInstance<T>,
    opts: &QuotientOptions,
    cfg: &AscentConfig,
) -> Result<QuotientVerification<T>> {
    let evaluation = quotient_rhs(inst, opts, cfg)?;
    let (l, r) = (evaluation.lhs.value, evaluation.rhs.value);
    let holds = (l - r).abs() <= T::of(opts.equality_tol) * l.max(r) + T::eps_num();
    let violations = evaluation.candidates.iter().filter(|c| !c.sound).count();
    let mut context = inst.context();
    context.insert("candidates".into(), evaluation.candidates.len().to_string());
    context.insert("violations".into(), violations.to_string());
    let report = InequalityReport::new("quotient_formula", evaluation.lhs.clone(), evaluation.rhs.clone(), holds, context);
    Ok(QuotientVerification { report, sound: violations == 0, violations, evaluation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn certificate_examples() {
        let id = MatrixOperator::<f64>::identity(2, e("2"));
        let basis = VectorFamily::basis(2, e("2"));
        let c = quotient_certificate(&basis, &id, e("2"), e("2"), e("2")).unwrap();
        assert_eq!(c.v.entries(), id.entries());
        let h = 0.5f64.sqrt();
        assert!(c.sigma.iter().all(|s| (s - h).abs() < 1e-15));
        let diag = MatrixOperator::<f64>::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]], e("2"), e("2")).unwrap();
        let c = quotient_certificate(&basis, &diag, e("2"), e("2"), e("2")).unwrap();
        assert_eq!(c.sigma, vec![1.0, 0.0]);
        let zero = MatrixOperator::<f64>::zeros(2, 2, e("2"), e("2"));
        assert_eq!(quotient_certificate(&basis, &zero, e("2"), e("2"), e("2")).unwrap().sigma, vec![1.0, 0.0]);
    }

    #[test]
    fn scalar_and_identity_instances() {
        let cfg = AscentConfig::default().with_starts(8);
        let opts = QuotientOptions { candidates: 8, ..QuotientOptions::default() };
        let one = MatrixOperator::<f64>::identity(1, e("2"));
        let v = quotient_verify(&QuotientInstance::new(one, e("2"), e("2"), None, 1).unwrap(), &opts, &cfg).unwrap();
        assert!(v.report.holds && v.sound);
        assert!((v.report.ratio - 1.0).abs() < 1e-12);
        assert!((v.evaluation.rhs.value - 1.0).abs() < 1e-12);

        let id = MatrixOperator::<f64>::identity(2, e("2"));
        let inst = QuotientInstance::new(id, e("2"), e("2"), Some(e("2")), 2).unwrap();
        assert_eq!(inst.r, e("1"));
        let v = quotient_verify(&inst, &opts, &cfg).unwrap();
        assert!((v.evaluation.rhs.value - 2f64.sqrt()).abs() < 1e-9, "{}", v.evaluation.rhs.value);
        assert!(v.report.holds && v.sound);
        assert!(v.evaluation.candidates.iter().all(|c| c.transfer_holds));

        let zero = MatrixOperator::<f64>::zeros(2, 2, e("2"), e("2"));
        let v = quotient_verify(&QuotientInstance::new(zero, e("2"), e("2"), None, 2).unwrap(), &opts, &cfg).unwrap();
        assert_eq!(v.evaluation.rhs.value, 0.0);
        assert!(v.report.holds && v.sound);
    }
}
