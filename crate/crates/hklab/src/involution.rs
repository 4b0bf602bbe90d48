//! The interpolating involution family `alpha_a` on matrices with real
//! eigenvalues, its Cartan partner `beta(M) = -M^t`, the tabulated involutions
//! of the classical real forms, and equivariance measurement.
//!
//! `alpha_a` interpolates entrywise conjugation (a = 0) and transpose (a = 1):
//! the matrix is encoded as a balanced quiver representative, every block is
//! rotated by `cos(s) I + sin(s) K` composed with the split conjugation
//! (s = a pi/2), and the result is decoded. The rotation is evaluated on a
//! representative with vanishing real moment map; there the residual gauge
//! freedom is unitary and the decoded matrix is well-defined.

use ndarray_linalg::c64;
use serde::{Deserialize, Serialize};

use crate::bridge::{self, Conventions};
use crate::error::{Error, Result};
use crate::linalg::{
    char_poly, conj_entrywise, fro_norm, random_orthogonal, to_complex, transpose, CMat,
    SeededGauss, Tolerances,
};
use crate::quiver::{apply_i, apply_k, combine, conj_rep, QuiverRep};

/// Interpolation parameter a in [0, 1] with its angle s = a pi / 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvolutionParam {
    a: f64,
}

impl InvolutionParam {
    pub fn new(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !a.is_finite() {
            return Err(Error::Validation(format!("involution parameter a = {a} outside [0, 1]")));
        }
        Ok(InvolutionParam { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn angle(&self) -> f64 {
        self.a * std::f64::consts::FRAC_PI_2
    }
}

/// The classical real-form families with their signature parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GlSplit,
    SlSplit,
    SlQuaternionic,
    SuPq,
    SoPq,
    SoStar,
    SpSplit,
    SpPq,
    /// a complex general linear algebra viewed as a real Lie algebra; only
    /// meaningful for the restricted-root operations
    ComplexGl,
}

/// A real form of a classical complex Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealFormSpec {
    pub family: Family,
    pub n: usize,
    /// signature parameter for the su_pq / so_pq / sp_pq families
    pub p: Option<usize>,
}

impl RealFormSpec {
    pub fn new(family: Family, n: usize, p: Option<usize>) -> Result<Self> {
        let spec = RealFormSpec { family, n, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::SlQuaternionic | Family::SoStar | Family::SpSplit | Family::SpPq => {
                if self.n % 2 != 0 {
                    return Err(Error::Validation(format!(
                        "family {:?} requires even n, got {}",
                        self.family, self.n
                    )));
                }
            }
            _ => {}
        }
        match self.family {
            Family::SuPq | Family::SoPq => {
                let p = self.p.ok_or_else(|| {
                    Error::Validation(format!("family {:?} requires the signature p", self.family))
                })?;
                if p > self.n {
                    return Err(Error::Validation(format!("signature p = {p} exceeds n = {}", self.n)));
                }
            }
            Family::SpPq => {
                let p = self.p.ok_or_else(|| {
                    Error::Validation("family sp_pq requires the signature p".into())
                })?;
                if p > self.n / 2 {
                    return Err(Error::Validation(format!(
                        "signature p = {p} exceeds m = {}",
                        self.n / 2
                    )));
                }
            }
            _ => {
                if self.p.is_some() {
                    return Err(Error::Validation(format!(
                        "family {:?} takes no signature parameter",
                        self.family
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `S_m = [[0, -I_m], [I_m, 0]]` of size 2m.
pub fn s_matrix(m: usize) -> CMat {
    let n = 2 * m;
    let mut s: CMat = ndarray::Array2::zeros((n, n));
    for i in 0..m {
        s[(i, m + i)] = c64::new(-1.0, 0.0);
        s[(m + i, i)] = c64::new(1.0, 0.0);
    }
    s
}

/// `I_{p,q} = diag(I_p, -I_q)`.
pub fn ipq_matrix(p: usize, q: usize) -> CMat {
    let n = p + q;
    let mut s: CMat = ndarray::Array2::zeros((n, n));
    for i in 0..n {
        s[(i, i)] = c64::new(if i < p { 1.0 } else { -1.0 }, 0.0);
    }
    s
}

/// `K_{p,m-p} = diag(I_{p,m-p}, I_{p,m-p})` of size 2m.
pub fn kpq_matrix(p: usize, m: usize) -> CMat {
    let n = 2 * m;
    let mut s: CMat = ndarray::Array2::zeros((n, n));
    for i in 0..n {
        let pos = i % m;
        s[(i, i)] = c64::new(if pos < p { 1.0 } else { -1.0 }, 0.0);
    }
    s
}

/// Membership residual of `M` in the complex Lie algebra underlying the form:
/// so_n: `M^t + M`; sp_2m: `M^t S + S M`; sl_n: `|tr M|`; gl: 0.
pub fn algebra_membership_residual(form: &RealFormSpec, m: &CMat) -> f64 {
    match form.family {
        Family::GlSplit | Family::SuPq | Family::ComplexGl => 0.0,
        Family::SlSplit | Family::SlQuaternionic => {
            (0..m.dim().0).map(|i| m[(i, i)]).sum::<c64>().norm()
        }
        Family::SoPq | Family::SoStar => fro_norm(&(&transpose(m) + m)),
        Family::SpSplit | Family::SpPq => {
            let s = s_matrix(form.n / 2);
            fro_norm(&(&transpose(m).dot(&s) + &s.dot(m)))
        }
    }
}

/// The pointwise quaternionic rotation `(cos s I + sin s K)` composed with the
/// split conjugation, applied blockwise to a representative.
pub fn alpha_point(rep: &QuiverRep, param: InvolutionParam) -> QuiverRep {
    let s = param.angle();
    let conj = conj_rep(rep);
    combine(
        c64::new(s.cos(), 0.0),
        &apply_i(&conj),
        c64::new(s.sin(), 0.0),
        &apply_k(&conj),
    )
}

/// The involution `alpha_a` on matrices with real spectrum.
///
/// Pipeline: balanced encode, pointwise rotation, decode. Output has the same
/// characteristic polynomial and the same Jordan type as the input.
pub fn alpha_gl(m: &CMat, param: InvolutionParam, tol: &Tolerances) -> Result<CMat> {
    alpha_gl_with(m, param, tol, None, &Conventions::default())
}

pub fn alpha_gl_with(
    m: &CMat,
    param: InvolutionParam,
    tol: &Tolerances,
    order: Option<&[f64]>,
    conv: &Conventions,
) -> Result<CMat> {
    let pt = bridge::encode_balanced_with(m, tol, 2000, order, conv)?;
    let rotated = alpha_point(&pt.rep, param);
    Ok(bridge::decode_with(&rotated, conv))
}

/// `beta(M) = -M^t`, the Cartan involution of the general linear algebra.
pub fn beta_gl(m: &CMat) -> CMat {
    transpose(m).mapv(|z| -z)
}

/// The tabulated holomorphic involution `theta` of the chosen real form.
pub fn theta_form(form: &RealFormSpec, m: &CMat, tol: &Tolerances) -> Result<CMat> {
    form.validate()?;
    let n = m.dim().0;
    if m.dim() != (form.n, form.n) {
        return Err(Error::ShapeMismatch {
            context: "theta_form".into(),
            expected: format!("{0}x{0}", form.n),
            got: format!("{:?}", m.dim()),
        });
    }
    let res = algebra_membership_residual(form, m);
    let bound = tol.residual.max(1e-8 * (1.0 + fro_norm(m)));
    if res > bound {
        return Err(Error::WrongAlgebra { residual: res });
    }
    let ad = |s: &CMat, sinv: &CMat, m: &CMat| s.dot(m).dot(sinv);
    Ok(match form.family {
        Family::GlSplit | Family::SlSplit => beta_gl(m),
        Family::SlQuaternionic => {
            // theta(M) = -Ad S_m (M^t); S^2 = -1 so S^-1 = -S
            let s = s_matrix(n / 2);
            let sinv = s.mapv(|z| -z);
            ad(&s, &sinv, &transpose(m)).mapv(|z| -z)
        }
        Family::SuPq | Family::SoPq => {
            let p = form.p.unwrap();
            let s = ipq_matrix(p, n - p);
            ad(&s, &s, m) // I_{p,q} is its own inverse
        }
        Family::SoStar | Family::SpSplit => {
            let s = s_matrix(n / 2);
            let sinv = s.mapv(|z| -z);
            ad(&s, &sinv, m)
        }
        Family::SpPq => {
            let p = form.p.unwrap();
            let s = kpq_matrix(p, n / 2);
            ad(&s, &s, m)
        }
        Family::ComplexGl => {
            return Err(Error::UnsupportedForm { form: "complex_gl has no matrix-level theta here".into() })
        }
    })
}

/// `alpha_a` for a classical form: `alpha_a(beta(theta(M)))`. At a = 0 this is
/// the form's conjugation `eta`; at a = 1 it is `-theta`.
pub fn alpha_classical(
    form: &RealFormSpec,
    m: &CMat,
    param: InvolutionParam,
    tol: &Tolerances,
) -> Result<CMat> {
    let bt = beta_gl(&theta_form(form, m, tol)?);
    alpha_gl(&bt, param, tol)
}

/// Measured equivariance residuals of `alpha_a` at one matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub orthogonal: f64,
    pub scaling: f64,
    pub beta_commutation: f64,
    pub involutivity: f64,
    pub char_poly_drift: f64,
    pub trials: usize,
}

/// Maximum residuals over `trials` random orthogonal conjugations and scalings:
/// `alpha(k M k^-1) - k alpha(M) k^-1`, `alpha(t M) - t alpha(M)`,
/// `alpha(beta(M)) - beta(alpha(M))`, `alpha(alpha(M)) - M`, and drift of the
/// characteristic polynomial.
pub fn equivariance_suite(
    m: &CMat,
    param: InvolutionParam,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<EquivarianceReport> {
    let n = m.dim().0;
    let am = alpha_gl(m, param, tol)?;
    let mut orth: f64 = 0.0;
    let mut scal: f64 = 0.0;
    let mut rng = SeededGauss::new(seed ^ 0x5eed);
    for t in 0..trials {
        let k = to_complex(&random_orthogonal(n, seed.wrapping_add(t as u64)));
        let kinv = transpose(&k);
        let akm = alpha_gl(&k.dot(m).dot(&kinv), param, tol)?;
        let want = k.dot(&am).dot(&kinv);
        orth = orth.max(fro_norm(&(&akm - &want)));

        let t_scale = 0.25 + 2.0 * rng.uniform();
        let atm = alpha_gl(&m.mapv(|z| z * t_scale), param, tol)?;
        let want = am.mapv(|z| z * t_scale);
        scal = scal.max(fro_norm(&(&atm - &want)));
    }
    let abm = alpha_gl(&beta_gl(m), param, tol)?;
    let beta_comm = fro_norm(&(&abm - &beta_gl(&am)));
    let aam = alpha_gl(&am, param, tol)?;
    let invol = fro_norm(&(&aam - m));
    let c0 = char_poly(m)?;
    let c1 = char_poly(&am)?;
    let scale = 1.0 + c0.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let drift = c0
        .iter()
        .zip(&c1)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max)
        / scale;
    Ok(EquivarianceReport {
        orthogonal: orth,
        scaling: scal,
        beta_commutation: beta_comm,
        involutivity: invol,
        char_poly_drift: drift,
        trials,
    })
}

/// Fixed-point classification at the endpoints: a matrix is alpha_0-fixed iff
/// real-entried, alpha_1-fixed iff symmetric. Exposed for the suites.
pub fn endpoint_fixed_residuals(m: &CMat) -> (f64, f64) {
    let real_res = fro_norm(&(m - &conj_entrywise(m)));
    let sym_res = fro_norm(&(m - &transpose(m)));
    (real_res, sym_res)
}

/// Hermitian-adjoint sanity helper used by the classical-form tests.
pub fn is_involution_on(mp: impl Fn(&CMat) -> CMat, m: &CMat) -> f64 {
    fro_norm(&(&mp(&mp(m)) - m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inv, random_well_conditioned};
    use ndarray::Array2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_real_spectrum(n: usize, seed: u64) -> CMat {
        let p = to_complex(&random_well_conditioned(n, seed, 0.4));
        let pinv = inv(&p).unwrap();
        let mut d: CMat = Array2::zeros((n, n));
        let mut g = SeededGauss::new(seed.wrapping_mul(3).wrapping_add(1));
        for i in 0..n {
            d[(i, i)] = c64::new(2.0 * g.next(), 0.0);
        }
        p.dot(&d).dot(&pinv)
    }

    #[test]
    fn endpoints_conjugation_and_transpose() {
        let t = tol();
        for n in 1..=4usize {
            let m = random_real_spectrum(n, 17 + n as u64);
            let nm = 1.0 + fro_norm(&m);
            let a0 = alpha_gl(&m, InvolutionParam::new(0.0).unwrap(), &t).unwrap();
            let a1 = alpha_gl(&m, InvolutionParam::new(1.0).unwrap(), &t).unwrap();
            assert!(fro_norm(&(&a0 - &conj_entrywise(&m))) <= 1e-8 * nm);
            assert!(fro_norm(&(&a1 - &transpose(&m))) <= 1e-8 * nm);
        }
    }

    #[test]
    fn scalar_fixed_for_all_a() {
        let t = tol();
        let m = ndarray::array![[c64::new(-1.75, 0.0)]];
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let out = alpha_gl(&m, InvolutionParam::new(a).unwrap(), &t).unwrap();
            assert!((out[(0, 0)] - m[(0, 0)]).norm() < 1e-10);
        }
    }

    #[test]
    fn involutive_at_half() {
        let t = tol();
        let m = random_real_spectrum(3, 5);
        let p = InvolutionParam::new(0.5).unwrap();
        let am = alpha_gl(&m, p, &t).unwrap();
        let aam = alpha_gl(&am, p, &t).unwrap();
        assert!(fro_norm(&(&aam - &m)) <= 1e-6 * (1.0 + fro_norm(&m)));
    }

    #[test]
    fn beta_examples() {
        let m = ndarray::array![
            [c64::new(0.0, 0.0), c64::new(1.0, 0.0)],
            [c64::new(-1.0, 0.0), c64::new(0.0, 0.0)]
        ];
        // antisymmetric: beta(M) = M
        assert!(fro_norm(&(&beta_gl(&m) - &m)) < 1e-15);
        let s = ndarray::array![
            [c64::new(1.0, 0.0), c64::new(2.0, 0.0)],
            [c64::new(2.0, 0.0), c64::new(-1.0, 0.0)]
        ];
        // symmetric: beta(M) = -M
        assert!(fro_norm(&(&beta_gl(&s) + &s)) < 1e-15);
        assert!(is_involution_on(|x| beta_gl(x), &m) < 1e-15);
    }

    #[test]
    fn theta_split_and_supq() {
        let t = tol();
        let form = RealFormSpec::new(Family::GlSplit, 3, None).unwrap();
        let m = random_real_spectrum(3, 9);
        let th = theta_form(&form, &m, &t).unwrap();
        assert!(fro_norm(&(&th + &transpose(&m))) < 1e-14);

        let su = RealFormSpec::new(Family::SuPq, 3, Some(1)).unwrap();
        let th2 = theta_form(&su, &m, &t).unwrap();
        let ipq = ipq_matrix(1, 2);
        let want = ipq.dot(&m).dot(&ipq);
        assert!(fro_norm(&(&th2 - &want)) < 1e-14);
    }

    #[test]
    fn theta_involutive_on_each_family() {
        let t = tol();
        let forms = [
            RealFormSpec::new(Family::GlSplit, 4, None).unwrap(),
            RealFormSpec::new(Family::SlQuaternionic, 4, None).unwrap(),
            RealFormSpec::new(Family::SuPq, 4, Some(2)).unwrap(),
        ];
        for form in forms {
            // membership: gl-like families accept anything (traceless for sl)
            let mut m = random_real_spectrum(4, 21);
            if matches!(form.family, Family::SlQuaternionic | Family::SlSplit) {
                let tr = (0..4).map(|i| m[(i, i)]).sum::<c64>() / c64::new(4.0, 0.0);
                for i in 0..4 {
                    m[(i, i)] -= tr;
                }
            }
            let th = theta_form(&form, &m, &t).unwrap();
            let thth = theta_form(&form, &th, &t).unwrap();
            assert!(fro_norm(&(&thth - &m)) < 1e-12, "{:?}", form.family);
        }
    }

    #[test]
    fn theta_rejects_wrong_algebra() {
        let t = tol();
        let form = RealFormSpec::new(Family::SoPq, 3, Some(1)).unwrap();
        let m = random_real_spectrum(3, 2); // not antisymmetric
        assert!(matches!(theta_form(&form, &m, &t), Err(Error::WrongAlgebra { .. })));
    }

    #[test]
    fn classical_endpoints_sl_split() {
        let t = tol();
        let mut m = random_real_spectrum(3, 33);
        let tr = (0..3).map(|i| m[(i, i)]).sum::<c64>() / c64::new(3.0, 0.0);
        for i in 0..3 {
            m[(i, i)] -= tr;
        }
        let form = RealFormSpec::new(Family::SlSplit, 3, None).unwrap();
        // a = 0: eta = entrywise conjugation
        let a0 = alpha_classical(&form, &m, InvolutionParam::new(0.0).unwrap(), &t).unwrap();
        assert!(fro_norm(&(&a0 - &conj_entrywise(&m))) <= 1e-8 * (1.0 + fro_norm(&m)));
        // a = 1: -theta = M^t
        let a1 = alpha_classical(&form, &m, InvolutionParam::new(1.0).unwrap(), &t).unwrap();
        assert!(fro_norm(&(&a1 - &transpose(&m))) <= 1e-8 * (1.0 + fro_norm(&m)));
    }

    #[test]
    fn classical_endpoints_so_pq() {
        let t = tol();
        // element of so_3 with real spectrum: [[0, i t, 0], [-i t, 0, 0], [0,0,0]] has spectrum {t, -t, 0}
        let mut m: CMat = Array2::zeros((3, 3));
        m[(0, 1)] = c64::new(0.0, 1.3);
        m[(1, 0)] = c64::new(0.0, -1.3);
        let form = RealFormSpec::new(Family::SoPq, 3, Some(1)).unwrap();
        let a1 = alpha_classical(&form, &m, InvolutionParam::new(1.0).unwrap(), &t).unwrap();
        let ipq = ipq_matrix(1, 2);
        let want = ipq.dot(&m).dot(&ipq).mapv(|z| -z);
        assert!(fro_norm(&(&a1 - &want)) <= 1e-8 * (1.0 + fro_norm(&m)));
        // output stays in so_3
        assert!(fro_norm(&(&transpose(&a1) + &a1)) < 1e-8);
    }

    #[test]
    fn equivariance_at_endpoints_is_exact() {
        let t = tol();
        let m = random_real_spectrum(3, 44);
        for a in [0.0, 1.0] {
            let rep = equivariance_suite(&m, InvolutionParam::new(a).unwrap(), 3, 7, &t).unwrap();
            assert!(rep.orthogonal <= 1e-8, "a={a}: {}", rep.orthogonal);
            assert!(rep.scaling <= 1e-8);
            assert!(rep.beta_commutation <= 1e-8);
            assert!(rep.involutivity <= 1e-8 * (1.0 + fro_norm(&m)));
        }
    }
}
