//! The quaternionic representation space of the chain quiver with one framing:
//! quiver data `(X, Y, x, y)`, inner product, complex structures I/J/K, real
//! and complex moment maps, gauge and framing-group actions, conjugation.
//!
//! Shapes for the instance used throughout: vertices k = 1..n carry
//! `V_k = C^{n+1-k}`, the framing is `W = C^n` at vertex 1. `X_k: V_k -> V_{k+1}`,
//! `Y_k: V_{k+1} -> V_k`, `x: W -> V_1`, `y: V_1 -> W`.

use ndarray::Array2;
use ndarray_linalg::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{adjoint, conj_entrywise, fro_norm, CMat};

/// Per-vertex dimension data. For the matrix model `v = (n, n-1, ..., 1)`
/// and `w = (n, 0, ..., 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionVector {
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

impl DimensionVector {
    /// The chain-with-framing instance for n x n matrices.
    pub fn matrix_model(n: usize) -> Self {
        DimensionVector {
            v: (0..n).map(|k| n - k).collect(),
            w: (0..n).map(|k| if k == 0 { n } else { 0 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.v.len() != self.w.len() {
            return Err(Error::ShapeMismatch {
                context: "dimension vector".into(),
                expected: format!("v and w of equal length"),
                got: format!("|v| = {}, |w| = {}", self.v.len(), self.w.len()),
            });
        }
        Ok(())
    }
}

/// A point of the representation space: chain maps plus framing maps.
/// Serializes through [`crate::json::QuiverRepJson`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuiverRep {
    pub dims: DimensionVector,
    /// `X_k: V_k -> V_{k+1}`, shape `v[k+1] x v[k]`, k = 0..n-2.
    pub xs: Vec<CMat>,
    /// `Y_k: V_{k+1} -> V_k`, shape `v[k] x v[k+1]`.
    pub ys: Vec<CMat>,
    /// `x: W -> V_1`, shape `v[0] x w[0]`.
    pub xw: CMat,
    /// `y: V_1 -> W`, shape `w[0] x v[0]`.
    pub yw: CMat,
}

/// Values of the moment maps, one square block per vertex. The real component
/// blocks are skew-hermitian.
#[derive(Debug, Clone)]
pub struct MomentValue {
    pub real: Vec<CMat>,
    pub complex: Vec<CMat>,
}

impl MomentValue {
    /// Frobenius norm of the real component over all vertices.
    pub fn real_norm(&self) -> f64 {
        self.real.iter().map(|b| fro_norm(b).powi(2)).sum::<f64>().sqrt()
    }

    pub fn complex_norm(&self) -> f64 {
        self.complex.iter().map(|b| fro_norm(b).powi(2)).sum::<f64>().sqrt()
    }
}

/// Per-vertex invertible gauge transformation in GL(V).
#[derive(Debug, Clone)]
pub struct GaugeElement {
    pub blocks: Vec<CMat>,
}

impl GaugeElement {
    pub fn identity(dims: &DimensionVector) -> Self {
        GaugeElement { blocks: dims.v.iter().map(|&d| crate::linalg::eye(d)).collect() }
    }
}

impl QuiverRep {
    /// All-zero representation on the given dimension vector.
    pub fn zero(dims: DimensionVector) -> Self {
        let n = dims.len();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in 0..n.saturating_sub(1) {
            xs.push(Array2::zeros((dims.v[k + 1], dims.v[k])));
            ys.push(Array2::zeros((dims.v[k], dims.v[k + 1])));
        }
        let xw = Array2::zeros((dims.v[0], dims.w[0]));
        let yw = Array2::zeros((dims.w[0], dims.v[0]));
        QuiverRep { dims, xs, ys, xw, yw }
    }

    pub fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        let n = self.dims.len();
        let exp_arrows = n.saturating_sub(1);
        if self.xs.len() != exp_arrows || self.ys.len() != exp_arrows {
            return Err(Error::ShapeMismatch {
                context: "quiver rep arrows".into(),
                expected: format!("{exp_arrows} X and Y maps"),
                got: format!("{} X, {} Y", self.xs.len(), self.ys.len()),
            });
        }
        for k in 0..exp_arrows {
            let want_x = (self.dims.v[k + 1], self.dims.v[k]);
            let want_y = (self.dims.v[k], self.dims.v[k + 1]);
            if self.xs[k].dim() != want_x || self.ys[k].dim() != want_y {
                return Err(Error::ShapeMismatch {
                    context: format!("arrow {k}"),
                    expected: format!("X {want_x:?}, Y {want_y:?}"),
                    got: format!("X {:?}, Y {:?}", self.xs[k].dim(), self.ys[k].dim()),
                });
            }
        }
        let want_xw = (self.dims.v[0], self.dims.w[0]);
        let want_yw = (self.dims.w[0], self.dims.v[0]);
        if self.xw.dim() != want_xw || self.yw.dim() != want_yw {
            return Err(Error::ShapeMismatch {
                context: "framing maps".into(),
                expected: format!("x {want_xw:?}, y {want_yw:?}"),
                got: format!("x {:?}, y {:?}", self.xw.dim(), self.yw.dim()),
            });
        }
        let finite = self.blocks().all(|b| b.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        if !finite {
            return Err(Error::Validation("quiver rep has non-finite entries".into()));
        }
        Ok(())
    }

    fn blocks(&self) -> impl Iterator<Item = &CMat> {
        self.xs.iter().chain(self.ys.iter()).chain([&self.xw, &self.yw])
    }

    fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> QuiverRep {
        QuiverRep {
            dims: self.dims.clone(),
            xs: self.xs.iter().map(&f).collect(),
            ys: self.ys.iter().map(&f).collect(),
            xw: f(&self.xw),
            yw: f(&self.yw),
        }
    }
}

/// Hyper-Kahler moment map, both components.
///
/// At vertex k (0-indexed):
/// `mu_R = (i/2)(X_{k-1} X_{k-1}^+ - Y_{k-1}^+ Y_{k-1} + Y_k Y_k^+ - X_k^+ X_k [+ x x^+ - y^+ y at k = 0])`,
/// `mu_C = X_{k-1} Y_{k-1} - Y_k X_k [+ x y at k = 0]`.
pub fn mu(rep: &QuiverRep) -> Result<MomentValue> {
    rep.validate()?;
    let n = rep.dims.len();
    let half_i = c64::new(0.0, 0.5);
    let mut real = Vec::with_capacity(n);
    let mut complex = Vec::with_capacity(n);
    for k in 0..n {
        let d = rep.dims.v[k];
        let mut r: CMat = Array2::zeros((d, d));
        let mut c: CMat = Array2::zeros((d, d));
        if k > 0 {
            let x = &rep.xs[k - 1];
            let y = &rep.ys[k - 1];
            r = r + &x.dot(&adjoint(x)) - &adjoint(y).dot(y);
            c = c + &x.dot(y);
        }
        if k + 1 < n {
            let x = &rep.xs[k];
            let y = &rep.ys[k];
            r = r + &y.dot(&adjoint(y)) - &adjoint(x).dot(x);
            c = c - &y.dot(x);
        }
        if k == 0 {
            r = r + &rep.xw.dot(&adjoint(&rep.xw)) - &adjoint(&rep.yw).dot(&rep.yw);
            c = c + &rep.xw.dot(&rep.yw);
        }
        real.push(r.mapv(|z| z * half_i));
        complex.push(c);
    }
    Ok(MomentValue { real, complex })
}

/// Multiplication by i on every block.
pub fn apply_i(rep: &QuiverRep) -> QuiverRep {
    let i = c64::new(0.0, 1.0);
    rep.map_blocks(|b| b.mapv(|z| z * i))
}

/// The second complex structure: `J(X, Y, x, y) = (-Y^+, X^+, -y^+, x^+)`.
pub fn apply_j(rep: &QuiverRep) -> QuiverRep {
    QuiverRep {
        dims: rep.dims.clone(),
        xs: rep.ys.iter().map(|y| adjoint(y).mapv(|z| -z)).collect(),
        ys: rep.xs.iter().map(adjoint).collect(),
        xw: adjoint(&rep.yw).mapv(|z| -z),
        yw: adjoint(&rep.xw),
    }
}

/// K = I after J.
pub fn apply_k(rep: &QuiverRep) -> QuiverRep {
    apply_i(&apply_j(rep))
}

/// Entrywise complex conjugation of every block (the split conjugation).
pub fn conj_rep(rep: &QuiverRep) -> QuiverRep {
    rep.map_blocks(conj_entrywise)
}

/// Componentwise linear combination `a * r1 + b * r2`.
pub fn combine(a: c64, r1: &QuiverRep, b: c64, r2: &QuiverRep) -> QuiverRep {
    QuiverRep {
        dims: r1.dims.clone(),
        xs: r1.xs.iter().zip(&r2.xs).map(|(p, q)| p.mapv(|z| z * a) + &q.mapv(|z| z * b)).collect(),
        ys: r1.ys.iter().zip(&r2.ys).map(|(p, q)| p.mapv(|z| z * a) + &q.mapv(|z| z * b)).collect(),
        xw: r1.xw.mapv(|z| z * a) + &r2.xw.mapv(|z| z * b),
        yw: r1.yw.mapv(|z| z * a) + &r2.yw.mapv(|z| z * b),
    }
}

/// Gauge action of GL(V):
/// `X_k -> g_{k+1} X_k g_k^-1`, `Y_k -> g_k Y_k g_{k+1}^-1`, `x -> g_1 x`, `y -> y g_1^-1`.
pub fn gauge_act(rep: &QuiverRep, g: &GaugeElement) -> Result<QuiverRep> {
    let n = rep.dims.len();
    if g.blocks.len() != n {
        return Err(Error::ShapeMismatch {
            context: "gauge element".into(),
            expected: format!("{n} blocks"),
            got: format!("{}", g.blocks.len()),
        });
    }
    let mut ginv = Vec::with_capacity(n);
    for (k, b) in g.blocks.iter().enumerate() {
        if b.dim() != (rep.dims.v[k], rep.dims.v[k]) {
            return Err(Error::ShapeMismatch {
                context: format!("gauge block {k}"),
                expected: format!("{0}x{0}", rep.dims.v[k]),
                got: format!("{:?}", b.dim()),
            });
        }
        if rep.dims.v[k] == 0 {
            ginv.push(b.clone());
            continue;
        }
        ginv.push(crate::linalg::inv(b).map_err(|_| Error::SingularGauge { vertex: k })?);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..n.saturating_sub(1) {
        xs.push(g.blocks[k + 1].dot(&rep.xs[k]).dot(&ginv[k]));
        ys.push(g.blocks[k].dot(&rep.ys[k]).dot(&ginv[k + 1]));
    }
    let xw = g.blocks[0].dot(&rep.xw);
    let yw = rep.yw.dot(&ginv[0]);
    Ok(QuiverRep { dims: rep.dims.clone(), xs, ys, xw, yw })
}

/// Framing-group action of GL(W): `x -> x g^-1`, `y -> g y`.
pub fn glw_act(rep: &QuiverRep, g: &CMat) -> Result<QuiverRep> {
    let w = rep.dims.w[0];
    if g.dim() != (w, w) {
        return Err(Error::ShapeMismatch {
            context: "framing group element".into(),
            expected: format!("{w}x{w}"),
            got: format!("{:?}", g.dim()),
        });
    }
    let ginv = crate::linalg::inv(g).map_err(|_| Error::SingularGauge { vertex: 0 })?;
    Ok(QuiverRep {
        dims: rep.dims.clone(),
        xs: rep.xs.clone(),
        ys: rep.ys.clone(),
        xw: rep.xw.dot(&ginv),
        yw: g.dot(&rep.yw),
    })
}

/// The U(V)-invariant hermitian norm `(sum of squared entry moduli)^(1/2)`.
pub fn rep_norm(rep: &QuiverRep) -> f64 {
    rep.blocks().map(|b| fro_norm(b).powi(2)).sum::<f64>().sqrt()
}

/// Scale every block by t; the moment map scales by t^2.
pub fn scale(rep: &QuiverRep, t: f64) -> QuiverRep {
    let t = c64::new(t, 0.0);
    rep.map_blocks(|b| b.mapv(|z| z * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eye, SeededGauss};

    pub(crate) fn random_rep(n: usize, seed: u64) -> QuiverRep {
        let dims = DimensionVector::matrix_model(n);
        let mut g = SeededGauss::new(seed);
        let mut cm = |r: usize, c: usize| {
            Array2::from_shape_fn((r, c), |_| c64::new(g.next(), g.next()))
        };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in 0..n - 1 {
            xs.push(cm(dims.v[k + 1], dims.v[k]));
            ys.push(cm(dims.v[k], dims.v[k + 1]));
        }
        let xw = cm(dims.v[0], dims.w[0]);
        let yw = cm(dims.w[0], dims.v[0]);
        QuiverRep { dims, xs, ys, xw, yw }
    }

    fn rep_dist(a: &QuiverRep, b: &QuiverRep) -> f64 {
        rep_norm(&combine(c64::new(1.0, 0.0), a, c64::new(-1.0, 0.0), b))
    }

    #[test]
    fn complex_structure_relations() {
        let r = random_rep(3, 7);
        let minus = |p: &QuiverRep| combine(c64::new(-1.0, 0.0), p, c64::new(0.0, 0.0), p);
        assert!(rep_dist(&apply_j(&apply_j(&r)), &minus(&r)) < 1e-12, "J^2 = -1");
        assert!(rep_dist(&apply_i(&apply_i(&r)), &minus(&r)) < 1e-12, "I^2 = -1");
        assert!(rep_dist(&apply_k(&apply_k(&r)), &minus(&r)) < 1e-12, "K^2 = -1");
        let ij = apply_i(&apply_j(&r));
        let ji = apply_j(&apply_i(&r));
        assert!(rep_dist(&ij, &minus(&ji)) < 1e-12, "IJ = -JI");
    }

    #[test]
    fn conj_involutive_and_commutes_with_j() {
        let r = random_rep(3, 8);
        assert!(rep_dist(&conj_rep(&conj_rep(&r)), &r) < 1e-14);
        let a = conj_rep(&apply_j(&r));
        let b = apply_j(&conj_rep(&r));
        assert!(rep_dist(&a, &b) < 1e-14, "split conjugation commutes with J");
    }

    #[test]
    fn moment_values_zero_rep() {
        let r = QuiverRep::zero(DimensionVector::matrix_model(3));
        let m = mu(&r).unwrap();
        assert!(m.real_norm() < 1e-15 && m.complex_norm() < 1e-15);
    }

    #[test]
    fn moment_real_component_skew_hermitian() {
        let r = random_rep(4, 9);
        let m = mu(&r).unwrap();
        for b in &m.real {
            let skew = b + &adjoint(b);
            assert!(fro_norm(&skew) < 1e-12);
        }
    }

    #[test]
    fn scalar_framing_moment() {
        // n = 1: complex moment at the only vertex is x y
        let dims = DimensionVector::matrix_model(1);
        let lam = 2.25;
        let mut r = QuiverRep::zero(dims);
        r.xw[(0, 0)] = c64::new(1.0, 0.0);
        r.yw[(0, 0)] = c64::new(0.0, -lam);
        let m = mu(&r).unwrap();
        assert!((m.complex[0][(0, 0)] - c64::new(0.0, -lam)).norm() < 1e-15);
    }

    #[test]
    fn gauge_round_trip_and_equivariance() {
        let r = random_rep(3, 10);
        let mut gs = SeededGauss::new(5);
        let blocks: Vec<CMat> = r
            .dims
            .v
            .iter()
            .map(|&d| {
                eye(d) + &Array2::from_shape_fn((d, d), |_| c64::new(0.3 * gs.next(), 0.3 * gs.next()))
            })
            .collect();
        let g = GaugeElement { blocks };
        let rg = gauge_act(&r, &g).unwrap();
        // round trip through the inverse gauge
        let ginv = GaugeElement {
            blocks: g.blocks.iter().map(|b| crate::linalg::inv(b).unwrap()).collect(),
        };
        let back = gauge_act(&rg, &ginv).unwrap();
        assert!(rep_dist(&back, &r) < 1e-11);
        // mu_C equivariance: mu_C(g.r) = g mu_C(r) g^-1 per vertex
        let m0 = mu(&r).unwrap();
        let m1 = mu(&rg).unwrap();
        for k in 0..3 {
            let want = g.blocks[k].dot(&m0.complex[k]).dot(&crate::linalg::inv(&g.blocks[k]).unwrap());
            assert!(fro_norm(&(&m1.complex[k] - &want)) < 1e-10);
        }
    }

    #[test]
    fn unitary_gauge_preserves_norm_and_mu_real() {
        let r = random_rep(3, 11);
        let blocks: Vec<CMat> = (0..3)
            .map(|k| crate::linalg::to_complex(&crate::linalg::random_orthogonal(r.dims.v[k], 33 + k as u64)))
            .collect();
        let g = GaugeElement { blocks };
        let rg = gauge_act(&r, &g).unwrap();
        assert!((rep_norm(&rg) - rep_norm(&r)).abs() < 1e-12);
        let m0 = mu(&r).unwrap();
        let m1 = mu(&rg).unwrap();
        for k in 0..3 {
            let want = g.blocks[k].dot(&m0.real[k]).dot(&adjoint(&g.blocks[k]));
            assert!(fro_norm(&(&m1.real[k] - &want)) < 1e-12);
        }
    }

    #[test]
    fn glw_conjugates_decode_product() {
        let r = random_rep(3, 12);
        let g = crate::linalg::to_complex(&crate::linalg::random_well_conditioned(3, 4, 0.3));
        let rg = glw_act(&r, &g).unwrap();
        let p0 = r.yw.dot(&r.xw);
        let p1 = rg.yw.dot(&rg.xw);
        let want = g.dot(&p0).dot(&crate::linalg::inv(&g).unwrap());
        assert!(fro_norm(&(&p1 - &want)) < 1e-10);
    }

    #[test]
    fn conj_rep_moment_intertwining() {
        // mu_C(conj r) = conj mu_C(r), mu_R(conj r) = -conj mu_R(r)
        let r = random_rep(3, 13);
        let mc = mu(&r).unwrap();
        let mcc = mu(&conj_rep(&r)).unwrap();
        for k in 0..3 {
            let want_c = conj_entrywise(&mc.complex[k]);
            assert!(fro_norm(&(&mcc.complex[k] - &want_c)) < 1e-12);
            let want_r = conj_entrywise(&mc.real[k]).mapv(|z| -z);
            assert!(fro_norm(&(&mcc.real[k] - &want_r)) < 1e-12);
        }
    }

    #[test]
    fn mu_scales_quadratically() {
        let r = random_rep(3, 14);
        let m1 = mu(&r).unwrap();
        let m2 = mu(&scale(&r, 2.0)).unwrap();
        for k in 0..3 {
            let want = m1.complex[k].mapv(|z| z * 4.0);
            assert!(fro_norm(&(&m2.complex[k] - &want)) < 1e-10);
            let want_r = m1.real[k].mapv(|z| z * 4.0);
            assert!(fro_norm(&(&m2.real[k] - &want_r)) < 1e-10);
        }
        assert!((rep_norm(&scale(&r, 3.0)) - 3.0 * rep_norm(&r)).abs() < 1e-10);
    }
}
