//! Tolerance-aware dense complex linear algebra: eigenvalue clustering,
//! numerical rank, Jordan-type extraction, seeded random group elements.
//!
//! All decisions that discretize continuous data (is this eigenvalue real?
//! what is the rank?) go through [`Tolerances`], whose defaults are sized for
//! double precision at n <= 8. Rank decisions near the cutoff are an error
//! ([`Error::RankAmbiguous`]) rather than a silent guess.

use ndarray::{Array1, Array2};
use ndarray_linalg::{c64, Eig, QR, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
pub type CMat = Array2<c64>;
/// Dense real matrix.
pub type RMat = Array2<f64>;

/// Numerical tolerance policy.
///
/// `eig_real` and `cluster` are relative: they are scaled by `1 + ||M||_F` of
/// the matrix under inspection. `rank_rel` is relative to the largest singular
/// value. `residual` is absolute (moment-map and fixed-point targets).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank_rel: f64,
    pub eig_real: f64,
    pub cluster: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rank_rel: 1e-9, eig_real: 1e-8, cluster: 1e-6, residual: 1e-10 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rank_rel > 0.0
            && self.rank_rel < 1.0
            && self.eig_real > 0.0
            && self.cluster > 0.0
            && self.residual > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Validation("tolerances must be strictly positive with rank_rel < 1".into()))
        }
    }

    /// Eigenvalue-imaginary-part bound scaled to the matrix.
    ///
    /// A Jordan block of size m splits under rounding into a star of radius
    /// about `(eps * ||M||)^(1/m)` with matching imaginary parts, so the bound
    /// is floored by the defect allowance below; the relative `eig_real`
    /// scaling alone would reject defective matrices it must accept.
    pub fn eig_real_for(&self, m: &CMat) -> f64 {
        (self.eig_real * (1.0 + fro_norm(m))).max(defect_allowance(m))
    }

    /// Clustering radius scaled to the matrix, with the same defect floor so
    /// a split Jordan cluster is merged back into one group.
    pub fn cluster_for(&self, m: &CMat) -> f64 {
        (self.cluster * (1.0 + fro_norm(m))).max(defect_allowance(m))
    }
}

/// Worst-case eigenvalue splitting of a defective matrix under rounding:
/// `20 ((1 + ||M||) eps)^(1/n)`. Measured headroom is about a factor 10 for
/// similarity transforms of condition number up to 100 at n <= 5.
pub fn defect_allowance(m: &CMat) -> f64 {
    let n = m.dim().0.max(1);
    20.0 * ((1.0 + fro_norm(m)) * f64::EPSILON).powf(1.0 / n as f64)
}

/// Clustered real spectrum: strictly increasing cluster centers with
/// multiplicities summing to n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub values: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Expand to the full eigenvalue tuple, weakly decreasing.
    pub fn expand_descending(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n());
        for (&v, &m) in self.values.iter().zip(&self.multiplicities).rev() {
            out.extend(std::iter::repeat(v).take(m));
        }
        out
    }

    /// Cluster center nearest to `x`.
    pub fn nearest_center(&self, x: f64) -> f64 {
        let mut best = self.values[0];
        for &v in &self.values[1..] {
            if (v - x).abs() < (best - x).abs() {
                best = v;
            }
        }
        best
    }
}

/// Per-eigenvalue partitions of Jordan block sizes, keyed by cluster center
/// (ascending). Parts are weakly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanType {
    pub blocks: Vec<(f64, Vec<usize>)>,
}

impl JordanType {
    /// Total size: sum of all parts over all eigenvalues.
    pub fn total(&self) -> usize {
        self.blocks.iter().map(|(_, p)| p.iter().sum::<usize>()).sum()
    }

    /// Partition at the given center, if present.
    pub fn partition_at(&self, center: f64, radius: f64) -> Option<&[usize]> {
        self.blocks
            .iter()
            .find(|(c, _)| (c - center).abs() <= radius)
            .map(|(_, p)| p.as_slice())
    }

    /// Structural equality: same partitions at pairwise-matching centers.
    pub fn same_as(&self, other: &JordanType, radius: f64) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|((c1, p1), (c2, p2))| (c1 - c2).abs() <= radius && p1 == p2)
    }
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro_norm_real(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Complex identity matrix.
pub fn eye(n: usize) -> CMat {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn to_complex(m: &RMat) -> CMat {
    m.mapv(|x| c64::new(x, 0.0))
}

pub fn adjoint(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

pub fn transpose(m: &CMat) -> CMat {
    m.t().to_owned()
}

pub fn conj_entrywise(m: &CMat) -> CMat {
    m.mapv(|z| z.conj())
}

fn require_square(m: &CMat) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::NonSquare { rows: r, cols: c });
    }
    Ok(r)
}

fn require_finite(m: &CMat) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(m: &CMat) -> Result<Array1<c64>> {
    let n = require_square(m)?;
    if n == 0 {
        return Ok(Array1::from_vec(vec![]));
    }
    let (vals, _) = m.eig()?;
    Ok(vals)
}

/// Check that the spectrum is real and cluster it.
///
/// Accepts iff every eigenvalue satisfies `|Im| <= eig_real * (1 + ||M||)`;
/// clusters the real parts by single linkage with the scaled cluster radius.
/// Cluster centers are member means.
pub fn eig_real_check(m: &CMat, tol: &Tolerances) -> Result<SpectralData> {
    let n = require_square(m)?;
    require_finite(m)?;
    if n == 0 {
        return Ok(SpectralData { values: vec![], multiplicities: vec![] });
    }
    let bound = tol.eig_real_for(m);
    let vals = eigenvalues(m)?;
    for v in vals.iter() {
        if v.im.abs() > bound {
            return Err(Error::NotRealSpectrum {
                value: format!("{:.6e}{:+.6e}i", v.re, v.im),
                imag: v.im.abs(),
                bound,
            });
        }
    }
    let mut re: Vec<f64> = vals.iter().map(|v| v.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let radius = tol.cluster_for(m);
    let mut values = Vec::new();
    let mut multiplicities = Vec::new();
    let mut start = 0;
    for i in 1..=re.len() {
        // single linkage: break the chain where the adjacent gap exceeds radius
        if i == re.len() || re[i] - re[i - 1] > radius {
            let cluster = &re[start..i];
            values.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
            multiplicities.push(cluster.len());
            start = i;
        }
    }
    Ok(SpectralData { values, multiplicities })
}

/// Numerical rank: singular values above `rank_rel * sigma_max`.
pub fn rank_tol(m: &CMat, tol: &Tolerances) -> usize {
    match singular_values(m) {
        Ok(s) => {
            if s.is_empty() || s[0] <= 0.0 {
                return 0;
            }
            let cut = tol.rank_rel * s[0];
            s.iter().filter(|&&x| x > cut).count()
        }
        Err(_) => 0,
    }
}

/// Rank with an ambiguity certificate: errors if any singular value lies
/// within a factor 10 of the cutoff on either side.
pub fn rank_tol_certified(m: &CMat, tol: &Tolerances) -> Result<usize> {
    let s = singular_values(m)?;
    if s.is_empty() || s[0] <= 0.0 {
        return Ok(0);
    }
    let cut = tol.rank_rel * s[0];
    for &x in &s {
        if x > cut / 10.0 && x < cut * 10.0 {
            return Err(Error::RankAmbiguous { sigma: x, cutoff: cut });
        }
    }
    Ok(s.iter().filter(|&&x| x > cut).count())
}

pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    let (r, c) = m.dim();
    if r == 0 || c == 0 {
        return Ok(vec![]);
    }
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.to_vec())
}

/// Rank against an absolute cutoff, with the factor-10 ambiguity window.
fn rank_with_cutoff(m: &CMat, cutoff: f64) -> Result<usize> {
    if cutoff <= 0.0 {
        return Ok(0);
    }
    let s = singular_values(m)?;
    for &x in &s {
        if x > cutoff / 10.0 && x < cutoff * 10.0 {
            return Err(Error::RankAmbiguous { sigma: x, cutoff });
        }
    }
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}

/// Jordan type from the numerical rank sequence of powers of `M - lambda I`.
///
/// For each cluster center the cumulative kernel dimensions `d_k` of
/// `(M - lambda)^k` form the partial sums of the conjugate partition; the
/// block-size partition is recovered by conjugation. Rank decisions use the
/// certified rank and so may surface [`Error::RankAmbiguous`].
pub fn jordan_type(m: &CMat, tol: &Tolerances) -> Result<JordanType> {
    let n = require_square(m)?;
    let spec = eig_real_check(m, tol)?;
    let mut blocks = Vec::new();
    let zero_floor = 100.0 * f64::EPSILON * (1.0 + fro_norm(m));
    for (&center, &mult) in spec.values.iter().zip(&spec.multiplicities) {
        let a = m - &(eye(n) * c64::new(center, 0.0));
        // cutoffs are relative to sigma_1(M - lambda)^k, not to the power's own
        // largest singular value: a power that collapses to numerical zero must
        // report rank zero rather than amplify round-off into spurious rank
        let base = singular_values(&a)?.first().copied().unwrap_or(0.0);
        if base <= zero_floor {
            // M is the scalar lambda I up to round-off
            blocks.push((center, vec![1; mult]));
            continue;
        }
        let mut pow = eye(n);
        let mut d_prev = 0usize;
        let mut increments = Vec::new();
        // d_k = dim ker (M - lambda)^k saturates at the algebraic multiplicity;
        // other clusters contribute nothing to this kernel.
        while d_prev < mult && increments.len() < n {
            pow = pow.dot(&a);
            let k = increments.len() as i32;
            let cutoff = (tol.rank_rel * base.powi(k + 1)).max(zero_floor * base.powi(k));
            let r = rank_with_cutoff(&pow, cutoff)?;
            let d = n - r;
            let inc = d.saturating_sub(d_prev);
            if inc == 0 {
                break;
            }
            increments.push(inc);
            d_prev = d;
        }
        // the increment sequence is the conjugate partition of the block sizes
        let mut partition = Vec::new();
        for j in 1..=increments.first().copied().unwrap_or(0) {
            partition.push(increments.iter().filter(|&&i| i >= j).count());
        }
        partition.sort_unstable_by(|a, b| b.cmp(a));
        blocks.push((center, partition));
    }
    Ok(JordanType { blocks })
}

/// Rank sequence `rank((M - lambda)^k)`, k = 1..=depth. Used by tests to
/// cross-check partitions against measured ranks.
pub fn rank_sequence(m: &CMat, lambda: f64, depth: usize, tol: &Tolerances) -> Result<Vec<usize>> {
    let n = require_square(m)?;
    let a = m - &(eye(n) * c64::new(lambda, 0.0));
    let mut pow = eye(n);
    let mut out = Vec::new();
    for _ in 0..depth {
        pow = pow.dot(&a);
        out.push(rank_tol_certified(&pow, tol)?);
    }
    Ok(out)
}

/// Seeded standard normal via Box-Muller on ChaCha8; deterministic across
/// platforms for a fixed seed.
pub struct SeededGauss {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl SeededGauss {
    pub fn new(seed: u64) -> Self {
        SeededGauss { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(s) = self.spare.take() {
            return s;
        }
        loop {
            let u: f64 = self.rng.gen::<f64>();
            let v: f64 = self.rng.gen::<f64>();
            if u <= f64::MIN_POSITIVE {
                continue;
            }
            let r = (-2.0 * u.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * v).sin_cos();
            self.spare = Some(r * s);
            return r * c;
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> RMat {
        Array2::from_shape_fn((rows, cols), |_| self.next())
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }
}

/// Deterministic random orthogonal matrix: QR of a seeded Gaussian with the
/// R-diagonal sign fixed so the factor is unique.
pub fn random_orthogonal(n: usize, seed: u64) -> RMat {
    assert!(n >= 1, "random_orthogonal needs n >= 1");
    let mut g = SeededGauss::new(seed);
    let a = g.matrix(n, n);
    let (q, r) = a.qr().expect("QR of a random Gaussian matrix");
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random invertible real matrix with singular values in [10^-lg, 10^lg],
/// so the condition number is at most 10^(2 lg).
pub fn random_well_conditioned(n: usize, seed: u64, lg: f64) -> RMat {
    let q1 = random_orthogonal(n, seed.wrapping_mul(2).wrapping_add(1));
    let q2 = random_orthogonal(n, seed.wrapping_mul(2).wrapping_add(2));
    let mut g = SeededGauss::new(seed.wrapping_add(7));
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let e = (2.0 * g.uniform() - 1.0) * lg;
        d[(i, i)] = 10f64.powf(e);
    }
    q1.dot(&d).dot(&q2)
}

/// Real matrix inverse via LU.
pub fn inv_real(m: &RMat) -> Result<RMat> {
    use ndarray_linalg::Inverse;
    Ok(m.inv()?)
}

/// Complex matrix inverse via LU.
pub fn inv(m: &CMat) -> Result<CMat> {
    use ndarray_linalg::Inverse;
    Ok(m.inv()?)
}

/// Coefficients of the characteristic polynomial (monic, descending powers),
/// via the Faddeev-LeVerrier recurrence. Exact enough at n <= 8.
pub fn char_poly(m: &CMat) -> Result<Vec<c64>> {
    let n = require_square(m)?;
    let mut coeffs = vec![c64::new(1.0, 0.0)];
    let mut aux = eye(n);
    let mut c_prev = c64::new(1.0, 0.0);
    for k in 1..=n {
        if k > 1 {
            for i in 0..n {
                aux[(i, i)] += c_prev;
            }
            aux = m.dot(&aux);
        } else {
            aux = m.clone();
        }
        let tr: c64 = (0..n).map(|i| aux[(i, i)]).sum();
        let ck = -tr / c64::new(k as f64, 0.0);
        coeffs.push(ck);
        c_prev = ck;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols: usize, data: &[(f64, f64)]) -> CMat {
        Array2::from_shape_vec((rows, cols), data.iter().map(|&(r, i)| c64::new(r, i)).collect())
            .unwrap()
    }

    fn rm(rows: usize, cols: usize, data: &[f64]) -> CMat {
        Array2::from_shape_vec((rows, cols), data.iter().map(|&r| c64::new(r, 0.0)).collect())
            .unwrap()
    }

    #[test]
    fn eig_real_check_diag() {
        let m = rm(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 2.0]);
        let s = eig_real_check(&m, &Tolerances::default()).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!((s.values[0] - 1.0).abs() < 1e-12);
        assert!((s.values[1] - 2.0).abs() < 1e-12);
        assert_eq!(s.multiplicities, vec![1, 2]);
    }

    #[test]
    fn eig_real_check_nilpotent() {
        let m = rm(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let s = eig_real_check(&m, &Tolerances::default()).unwrap();
        assert_eq!(s.values.len(), 1);
        assert!(s.values[0].abs() < 1e-8);
        assert_eq!(s.multiplicities, vec![2]);
    }

    #[test]
    fn eig_real_check_rejects_rotation() {
        let m = rm(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let e = eig_real_check(&m, &Tolerances::default()).unwrap_err();
        assert!(matches!(e, Error::NotRealSpectrum { .. }));
    }

    #[test]
    fn jordan_type_single_block() {
        let m = rm(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let j = jordan_type(&m, &Tolerances::default()).unwrap();
        assert_eq!(j.blocks.len(), 1);
        assert_eq!(j.blocks[0].1, vec![2]);
    }

    #[test]
    fn jordan_type_zero_matrix() {
        let m = rm(3, 3, &[0.0; 9]);
        let j = jordan_type(&m, &Tolerances::default()).unwrap();
        assert_eq!(j.blocks[0].1, vec![1, 1, 1]);
    }

    #[test]
    fn jordan_type_under_similarity() {
        // J_2(1) + J_1(1) conjugated by a moderate-condition matrix
        let jform = rm(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let p = to_complex(&random_well_conditioned(3, 11, 0.5));
        let pinv = inv(&p).unwrap();
        let m = p.dot(&jform).dot(&pinv);
        let j = jordan_type(&m, &Tolerances::default()).unwrap();
        assert_eq!(j.blocks.len(), 1);
        assert!((j.blocks[0].0 - 1.0).abs() < 1e-6);
        assert_eq!(j.blocks[0].1, vec![2, 1]);
    }

    #[test]
    fn rank_examples() {
        let tol = Tolerances::default();
        assert_eq!(rank_tol(&rm(2, 2, &[0.0; 4]), &tol), 0);
        assert_eq!(rank_tol(&eye(4), &tol), 4);
        // rank-1 outer product
        let u = cm(3, 1, &[(1.0, 0.5), (0.0, -1.0), (2.0, 0.0)]);
        let outer = u.dot(&adjoint(&u));
        assert_eq!(rank_tol(&outer, &tol), 1);
    }

    #[test]
    fn random_orthogonal_properties() {
        for n in [1usize, 3, 5] {
            let q = random_orthogonal(n, 42);
            let qtq = q.t().dot(&q);
            let mut err: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    err = err.max((qtq[(i, j)] - want).abs());
                }
            }
            assert!(err < 1e-12, "n={n} err={err}");
            let q2 = random_orthogonal(n, 42);
            assert_eq!(q, q2, "determinism for fixed seed");
        }
    }

    #[test]
    fn char_poly_matches_roots() {
        let m = rm(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let c = char_poly(&m).unwrap();
        // (T-1)(T-2)(T-3) = T^3 - 6T^2 + 11T - 6
        let want = [1.0, -6.0, 11.0, -6.0];
        for (a, b) in c.iter().zip(want) {
            assert!((a.re - b).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_invariant_under_transpose_and_conj() {
        let tol = Tolerances::default();
        let p = to_complex(&random_well_conditioned(4, 3, 0.4));
        let pinv = inv(&p).unwrap();
        let d = rm(4, 4, &[1.5, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        let m = p.dot(&d).dot(&pinv);
        let s0 = eig_real_check(&m, &tol).unwrap();
        let st = eig_real_check(&transpose(&m), &tol).unwrap();
        let sc = eig_real_check(&conj_entrywise(&m), &tol).unwrap();
        for (a, b) in s0.values.iter().zip(&st.values) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in s0.values.iter().zip(&sc.values) {
            assert!((a - b).abs() < 1e-8);
        }
        assert_eq!(s0.multiplicities, st.multiplicities);
        assert_eq!(s0.multiplicities, sc.multiplicities);
    }
}
