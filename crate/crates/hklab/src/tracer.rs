//! Continuation along the fixed locus of the involution family: from a real
//! matrix at a = 0 to a complex symmetric matrix at a = 1, by a
//! predictor-corrector march.
//!
//! The corrector is involution averaging, `M <- (M + alpha_a(M)) / 2`,
//! followed by a structure-restoring spectral snap. Averaging needs only
//! evaluations of `alpha_a` and is locally contracting onto the fixed set;
//! the snap projects the iterate back onto the source fiber (exact cluster
//! centers and an exactly nilpotent part per cluster), which prevents the
//! secular eigenvalue drift the averaging would otherwise accumulate.

use ndarray::Array2;
use ndarray_linalg::{c64, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::involution::{alpha_gl, InvolutionParam};
use crate::json::MatrixJson;
use crate::linalg::{
    char_poly, eig_real_check, eye, fro_norm, jordan_type, transpose, CMat, JordanType,
    SpectralData, Tolerances,
};

/// One accepted continuation step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub a: f64,
    pub corrector_residual: f64,
    pub corrector_iterations: usize,
    pub char_poly_drift: f64,
}

/// A sampled path along the fixed locus, from the real source (a = 0) to the
/// symmetric target (a = 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TracePath {
    pub samples: Vec<(f64, MatrixJson)>,
    pub source: MatrixJson,
    pub target: MatrixJson,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl TracePath {
    pub fn sample_mats(&self) -> Result<Vec<(f64, CMat)>> {
        self.samples.iter().map(|(a, m)| Ok((*a, m.to_cmat()?))).collect()
    }
}

/// Endpoint report of [`verify_ks_endpoint`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KsEndpointReport {
    pub symmetry_residual: f64,
    pub spectral_drift: f64,
    pub jordan_source: JordanType,
    pub jordan_target: JordanType,
    pub jordan_equal: bool,
    /// for a nilpotent path, the partition labelling the orbit pair
    pub ks_label: Option<Vec<usize>>,
}

/// Structure data of the source fiber used by the snap.
struct FiberStructure {
    centers: Vec<f64>,
    mults: Vec<usize>,
    parts: Vec<Vec<usize>>,
}

impl FiberStructure {
    fn of(m: &CMat, tol: &Tolerances) -> Result<Self> {
        let spec = eig_real_check(m, tol)?;
        let jt = jordan_type(m, tol)?;
        let parts = spec
            .values
            .iter()
            .map(|&c| {
                jt.partition_at(c, tol.cluster_for(m).max(1e-12))
                    .map(|p| p.to_vec())
                    .unwrap_or_default()
            })
            .collect();
        Ok(FiberStructure { centers: spec.values.clone(), mults: spec.multiplicities.clone(), parts })
    }

    /// Fiber structure of a matrix that is only approximately on the fixed
    /// locus. The off-fiber mass shows up as imaginary eigenvalue parts; it
    /// widens the clustering radius and the rank cutoffs so the intended
    /// nearby structure is recovered rather than the perturbed one.
    fn of_approx(m: &CMat, tol: &Tolerances) -> Result<Self> {
        let n = m.dim().0;
        let vals = crate::linalg::eigenvalues(m)?;
        let noise = vals.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
        let basin = 0.1 * (1.0 + fro_norm(m));
        if noise > basin {
            return Err(Error::Validation(format!(
                "corrector input too far from the fixed locus: imaginary mass {noise:.3e}"
            )));
        }
        let radius = tol.cluster_for(m).max(10.0 * noise);
        let mut re: Vec<f64> = vals.iter().map(|v| v.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut centers = Vec::new();
        let mut mults = Vec::new();
        let mut start = 0;
        for i in 1..=re.len() {
            if i == re.len() || re[i] - re[i - 1] > radius {
                let cluster = &re[start..i];
                centers.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                mults.push(cluster.len());
                start = i;
            }
        }
        // partitions with noise-floored rank cutoffs
        let mut parts = Vec::new();
        for (&c, &mult) in centers.iter().zip(&mults) {
            let a = m - &(eye(n) * c64::new(c, 0.0));
            let base = crate::linalg::singular_values(&a)?.first().copied().unwrap_or(0.0);
            let floor = (10.0 * noise).max(100.0 * f64::EPSILON * (1.0 + fro_norm(m)));
            if base <= floor {
                parts.push(vec![1; mult]);
                continue;
            }
            let mut pow = eye(n);
            let mut d_prev = 0usize;
            let mut increments = Vec::new();
            while d_prev < mult && increments.len() < n {
                pow = pow.dot(&a);
                let k = increments.len() as i32;
                let cutoff = (tol.rank_rel * base.powi(k + 1)).max(floor * base.powi(k));
                let s = crate::linalg::singular_values(&pow)?;
                let r = s.iter().filter(|&&x| x > cutoff).count();
                let inc = (n - r).saturating_sub(d_prev);
                if inc == 0 {
                    break;
                }
                increments.push(inc);
                d_prev = n - r;
            }
            let mut partition = Vec::new();
            for j in 1..=increments.first().copied().unwrap_or(0) {
                partition.push(increments.iter().filter(|&&i| i >= j).count());
            }
            partition.sort_unstable_by(|a, b| b.cmp(a));
            parts.push(partition);
        }
        Ok(FiberStructure { centers, mults, parts })
    }
}

/// Orthonormal basis adapted to the kernel flag `ker D <= ker D^2 <= ...` with
/// level dimensions prescribed by the partition. In this basis a matrix that
/// is nilpotent with that flag is strictly block upper triangular.
fn kernel_flag_basis(d: &CMat, part: &[usize]) -> Result<CMat> {
    let m = d.dim().0;
    let depth = part.first().copied().unwrap_or(0);
    let mut collected: CMat = Array2::zeros((m, 0));
    let mut have = 0usize;
    let mut pow = eye(m);
    for k in 1..=depth {
        pow = pow.dot(d);
        let want: usize = part.iter().map(|&p| p.min(k)).sum();
        let (_, _, vt) = pow.svd(false, true)?;
        let vt = vt.expect("svd vt");
        // null space: trailing right-singular vectors, prescribed count
        let null = Array2::from_shape_fn((m, want), |(i, j)| vt[(m - want + j, i)].conj());
        // orthogonalize against the flag collected so far, keep the new directions
        let fresh = if have == 0 {
            null
        } else {
            let proj = collected.dot(&crate::linalg::adjoint(&collected).dot(&null));
            &null - &proj
        };
        let (u, _, _) = fresh.svd(true, false)?;
        let u = u.expect("svd u");
        let add = want - have;
        let mut next: CMat = Array2::zeros((m, have + add));
        for i in 0..m {
            for j in 0..have {
                next[(i, j)] = collected[(i, j)];
            }
            for j in 0..add {
                next[(i, have + j)] = u[(i, j)];
            }
        }
        collected = next;
        have += add;
    }
    if have < m {
        // complete to a unitary basis
        let resid = &eye(m) - &collected.dot(&crate::linalg::adjoint(&collected));
        let (u, _, _) = resid.svd(true, false)?;
        let u = u.expect("svd u");
        let mut next: CMat = Array2::zeros((m, m));
        for i in 0..m {
            for j in 0..have {
                next[(i, j)] = collected[(i, j)];
            }
            for j in 0..(m - have) {
                next[(i, have + j)] = u[(i, j)];
            }
        }
        collected = next;
    }
    Ok(collected)
}

/// Nearest-flag exactly nilpotent approximant of a nearly nilpotent matrix.
fn nilpotentize(d: &CMat, part: &[usize]) -> Result<CMat> {
    let m = d.dim().0;
    if m == 0 {
        return Ok(d.clone());
    }
    if part.first().copied().unwrap_or(1) <= 1 {
        return Ok(Array2::zeros((m, m)));
    }
    let q = kernel_flag_basis(d, part)?;
    let t = crate::linalg::adjoint(&q).dot(d).dot(&q);
    // keep only blocks strictly above the graded diagonal
    let depth = part[0];
    let mut bounds = vec![0usize];
    for k in 1..=depth {
        bounds.push(part.iter().map(|&p| p.min(k)).sum());
    }
    let mut tn: CMat = Array2::zeros((m, m));
    for level in 1..depth {
        let (c0, c1) = (bounds[level], bounds[level + 1]);
        for j in c0..c1 {
            for i in 0..bounds[level] {
                tn[(i, j)] = t[(i, j)];
            }
        }
    }
    Ok(q.dot(&tn).dot(&crate::linalg::adjoint(&q)))
}

/// Project onto the source fiber: exact cluster centers, exactly nilpotent
/// within-cluster parts. Multi-cluster matrices are split along generalized
/// eigenspaces first.
fn snap_structured(m: &CMat, fiber: &FiberStructure) -> Result<CMat> {
    let n = m.dim().0;
    if fiber.centers.len() == 1 {
        let c = fiber.centers[0];
        let d = m - &(eye(n) * c64::new(c, 0.0));
        let nil = nilpotentize(&d, &fiber.parts[0])?;
        return Ok(nil + &(eye(n) * c64::new(c, 0.0)));
    }
    // generalized eigenspace basis per cluster: null space of (M - c)^mult
    let mut basis: CMat = Array2::zeros((n, 0));
    for (&c, &mult) in fiber.centers.iter().zip(&fiber.mults) {
        let mut pow = eye(n);
        let shift = m - &(eye(n) * c64::new(c, 0.0));
        for _ in 0..mult {
            pow = pow.dot(&shift);
        }
        let (_, _, vt) = pow.svd(false, true)?;
        let vt = vt.expect("svd vt");
        let g = Array2::from_shape_fn((n, mult), |(i, j)| vt[(n - mult + j, i)].conj());
        let old = basis.dim().1;
        let mut next: CMat = Array2::zeros((n, old + mult));
        for i in 0..n {
            for j in 0..old {
                next[(i, j)] = basis[(i, j)];
            }
            for j in 0..mult {
                next[(i, old + j)] = g[(i, j)];
            }
        }
        basis = next;
    }
    let sinv = crate::linalg::inv(&basis)?;
    let b = sinv.dot(m).dot(&basis);
    let mut out: CMat = Array2::zeros((n, n));
    let mut pos = 0;
    for ((&c, &mult), part) in fiber.centers.iter().zip(&fiber.mults).zip(&fiber.parts) {
        let mut blk: CMat = Array2::zeros((mult, mult));
        for i in 0..mult {
            for j in 0..mult {
                blk[(i, j)] = b[(pos + i, pos + j)];
            }
        }
        let d = &blk - &(eye(mult) * c64::new(c, 0.0));
        let nil = nilpotentize(&d, part)?;
        for i in 0..mult {
            for j in 0..mult {
                out[(pos + i, pos + j)] =
                    nil[(i, j)] + if i == j { c64::new(c, 0.0) } else { c64::new(0.0, 0.0) };
            }
        }
        pos += mult;
    }
    Ok(basis.dot(&out).dot(&sinv))
}

/// Default fixed-point tolerance of the corrector. The averaging iteration
/// bottoms out near the balance residual amplified by one decode, so the
/// corrector targets a slightly looser scale than `tol.residual`.
pub fn corrector_tolerance(tol: &Tolerances) -> f64 {
    (tol.residual * 100.0).max(1e-12)
}

/// Project an approximately fixed matrix onto the fixed locus of `alpha_a`.
///
/// Pre: `||alpha_a(M) - M|| <= 0.1 (1 + ||M||)`. Errors with
/// [`Error::CorrectorStall`] when the residual plateaus above tolerance.
pub fn corrector(m: &CMat, param: InvolutionParam, tol: &Tolerances, max_iter: usize) -> Result<CMat> {
    let fiber = FiberStructure::of_approx(m, tol)?;
    corrector_inner(m, param, tol, max_iter, &fiber).map(|(out, _, _)| out)
}

fn corrector_inner(
    m: &CMat,
    param: InvolutionParam,
    tol: &Tolerances,
    max_iter: usize,
    fiber: &FiberStructure,
) -> Result<(CMat, f64, usize)> {
    let target = corrector_tolerance(tol);
    // land on the source fiber before the first involution evaluation: the
    // pipeline behind alpha_a expects an exactly real, exactly structured
    // spectrum
    let mut cur = snap_structured(m, fiber)?;
    let mut res = f64::INFINITY;
    for it in 0..max_iter {
        let am = alpha_gl(&cur, param, tol)?;
        res = fro_norm(&(&am - &cur));
        if res <= target {
            return Ok((cur, res, it));
        }
        let half = c64::new(0.5, 0.0);
        cur = (&cur + &am).mapv(|z| z * half);
        cur = snap_structured(&cur, fiber)?;
    }
    Err(Error::CorrectorStall { a: param.a(), residual: res, tol: target })
}

/// Trace the fixed locus from a real matrix at a = 0 to a symmetric matrix at
/// a = 1 with a uniform step (adaptive halving on corrector stalls, floor
/// `1/(64 steps)`). The path is traced on the norm slice of the source and
/// rescaled, and the zero matrix short-circuits to the constant path.
pub fn trace(m0: &CMat, steps: usize, tol: &Tolerances) -> Result<TracePath> {
    if steps == 0 {
        return Err(Error::Validation("trace needs steps >= 1".into()));
    }
    let n = m0.dim().0;
    if m0.dim().1 != n {
        return Err(Error::NonSquare { rows: m0.dim().0, cols: m0.dim().1 });
    }
    let real_res = fro_norm(&(m0 - &m0.mapv(|z| c64::new(z.re, 0.0))));
    if real_res > tol.residual.max(1e-12) {
        return Err(Error::Validation("trace source must have real entries".into()));
    }
    let scale = fro_norm(m0);
    if scale == 0.0 {
        let zero = MatrixJson::from_cmat(m0);
        let samples = (0..=steps).map(|i| (i as f64 / steps as f64, zero.clone())).collect();
        return Ok(TracePath { samples, source: zero.clone(), target: zero, diagnostics: vec![] });
    }
    let mh = m0.mapv(|z| z / scale);
    let fiber = FiberStructure::of(&mh, tol)?;
    let source_cp = char_poly(&mh)?;
    let cp_scale = 1.0 + source_cp.iter().map(|z| z.norm()).fold(0.0f64, f64::max);

    let mut samples = vec![(0.0, mh.clone())];
    let mut diagnostics = Vec::new();
    let mut cur = mh.clone();
    let mut a = 0.0f64;
    let h0 = 1.0 / steps as f64;
    let floor = h0 / 64.0;
    let mut h = h0;
    while a < 1.0 - 1e-12 {
        let next = (a + h).min(1.0);
        let param = InvolutionParam::new(next)?;
        match corrector_inner(&cur, param, tol, 60, &fiber) {
            Ok((m_next, res, iters)) => {
                let cp = char_poly(&m_next)?;
                let drift = source_cp
                    .iter()
                    .zip(&cp)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0f64, f64::max)
                    / cp_scale;
                diagnostics.push(StepDiagnostics {
                    a: next,
                    corrector_residual: res,
                    corrector_iterations: iters,
                    char_poly_drift: drift,
                });
                cur = m_next;
                a = next;
                samples.push((a, cur.clone()));
                h = (h * 2.0).min(h0); // recover the nominal step after halvings
            }
            Err(Error::CorrectorStall { .. }) if h > floor => {
                h = (h / 2.0).max(floor);
            }
            Err(Error::CorrectorStall { .. }) => {
                // report the partial path rather than silently truncating
                return Err(Error::StepFloorReached { a: next, samples: samples.len() });
            }
            Err(e) => return Err(e),
        }
    }
    // final sample must be symmetric
    let target = samples.last().unwrap().1.clone();
    let sym_res = fro_norm(&(&target - &transpose(&target)));
    if sym_res > 10.0 * corrector_tolerance(tol) {
        return Err(Error::CorrectorStall {
            a: 1.0,
            residual: sym_res,
            tol: 10.0 * corrector_tolerance(tol),
        });
    }
    let rescale = |m: &CMat| m.mapv(|z| z * scale);
    Ok(TracePath {
        samples: samples.iter().map(|(a, m)| (*a, MatrixJson::from_cmat(&rescale(m)))).collect(),
        source: MatrixJson::from_cmat(m0),
        target: MatrixJson::from_cmat(&rescale(&target)),
        diagnostics,
    })
}

/// Endpoint checks of a traced path: target symmetry, spectral drift from
/// source to target, Jordan-type equality, and the partition label in the
/// nilpotent case.
pub fn verify_ks_endpoint(path: &TracePath, tol: &Tolerances) -> Result<KsEndpointReport> {
    let source = path.source.to_cmat()?;
    let target = path.target.to_cmat()?;
    let symmetry_residual = fro_norm(&(&target - &transpose(&target)));
    let c0 = char_poly(&source)?;
    let c1 = char_poly(&target)?;
    let cp_scale = 1.0 + c0.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let spectral_drift =
        c0.iter().zip(&c1).map(|(x, y)| (x - y).norm()).fold(0.0f64, f64::max) / cp_scale;
    let jordan_source = jordan_type(&source, tol)?;
    let jordan_target = jordan_type(&target, tol)?;
    let radius = tol.cluster_for(&source).max(1e-9);
    let jordan_equal = jordan_source.same_as(&jordan_target, radius);
    let ks_label = if jordan_source.blocks.len() == 1 && jordan_source.blocks[0].0.abs() <= radius {
        Some(jordan_source.blocks[0].1.clone())
    } else {
        None
    };
    Ok(KsEndpointReport {
        symmetry_residual,
        spectral_drift,
        jordan_source,
        jordan_target,
        jordan_equal,
        ks_label,
    })
}

/// Spectrum of a path sample, for diagnostics.
pub fn sample_spectrum(m: &CMat, tol: &Tolerances) -> Result<SpectralData> {
    eig_real_check(m, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn jb(lam: f64, size: usize) -> CMat {
        let mut b: CMat = Array2::zeros((size, size));
        for i in 0..size {
            b[(i, i)] = c64::new(lam, 0.0);
            if i + 1 < size {
                b[(i, i + 1)] = c64::new(1.0, 0.0);
            }
        }
        b
    }

    #[test]
    fn corrector_fixes_real_at_zero() {
        let m = array![
            [c64::new(0.4, 0.0), c64::new(1.0, 0.0)],
            [c64::new(0.0, 0.0), c64::new(-0.3, 0.0)]
        ];
        let out = corrector(&m, InvolutionParam::new(0.0).unwrap(), &tol(), 10).unwrap();
        assert!(fro_norm(&(&out - &m)) < 1e-12, "already fixed at a = 0");
    }

    #[test]
    fn corrector_fixes_symmetric_at_one() {
        let m = array![
            [c64::new(0.4, 0.0), c64::new(0.7, 0.0)],
            [c64::new(0.7, 0.0), c64::new(-0.3, 0.0)]
        ];
        let out = corrector(&m, InvolutionParam::new(1.0).unwrap(), &tol(), 10).unwrap();
        assert!(fro_norm(&(&out - &m)) < 1e-12);
    }

    #[test]
    fn corrector_projects_perturbed_real_at_zero() {
        // perturbed real nilpotent: averaging recovers the real part at a = 0
        let mut m = jb(0.0, 2);
        m[(1, 0)] = c64::new(0.0, 1e-3);
        let out = corrector(&m, InvolutionParam::new(0.0).unwrap(), &tol(), 20).unwrap();
        let imag_mass: f64 = out.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(imag_mass < 1e-10, "imaginary mass {imag_mass}");
        let jt = jordan_type(&out, &tol()).unwrap();
        assert_eq!(jt.blocks[0].1, vec![2]);
    }

    #[test]
    fn trace_zero_matrix_constant() {
        let m: CMat = Array2::zeros((3, 3));
        let p = trace(&m, 8, &tol()).unwrap();
        for (_, s) in &p.samples {
            assert!(fro_norm(&s.to_cmat().unwrap()) == 0.0);
        }
    }

    #[test]
    fn trace_j2_hits_symmetric_nilpotent() {
        let p = trace(&jb(0.0, 2), 16, &tol()).unwrap();
        let t = p.target.to_cmat().unwrap();
        assert!(fro_norm(&(&t - &transpose(&t))) < 1e-7);
        assert!(fro_norm(&t.dot(&t)) < 1e-7, "target stays nilpotent");
        // the only nonzero symmetric nilpotent 2x2 shape: z [[1, i], [i, -1]]
        let z = t[(0, 0)];
        assert!(z.norm() > 1e-3);
        let i = c64::new(0.0, 1.0);
        let want = array![[z, z * i], [z * i, -z]];
        let want2 = array![[z, -z * i], [-z * i, -z]];
        let d1 = fro_norm(&(&t - &want));
        let d2 = fro_norm(&(&t - &want2));
        assert!(d1.min(d2) < 1e-6, "target {t:?}");
    }

    #[test]
    fn trace_diagonal_constant() {
        let m = array![
            [c64::new(1.0, 0.0), c64::new(0.0, 0.0), c64::new(0.0, 0.0)],
            [c64::new(0.0, 0.0), c64::new(2.0, 0.0), c64::new(0.0, 0.0)],
            [c64::new(0.0, 0.0), c64::new(0.0, 0.0), c64::new(3.0, 0.0)]
        ];
        let p = trace(&m, 8, &tol()).unwrap();
        for (_, s) in &p.samples {
            let sm = s.to_cmat().unwrap();
            assert!(fro_norm(&(&sm - &m)) < 1e-6, "diagonal path must be constant");
        }
    }

    #[test]
    fn endpoint_report_nilpotent() {
        let p = trace(&jb(0.0, 2), 16, &tol()).unwrap();
        let r = verify_ks_endpoint(&p, &tol()).unwrap();
        assert!(r.jordan_equal);
        assert_eq!(r.ks_label, Some(vec![2]));
        assert!(r.symmetry_residual < 1e-7);
        assert!(r.spectral_drift < 1e-7);
    }
}
