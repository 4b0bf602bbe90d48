//! Encode a matrix with real eigenvalues as a quiver representative on the
//! prescribed complex-moment level set, drive the real moment map to zero by
//! Kempf-Ness flow, and decode back.
//!
//! Conventions (frozen by the endpoint identities of the involution family and
//! the level-trace identity; see `docs/conventions.md`):
//!   decode(rep)   = kappa * y * x              with kappa = i
//!   level at k    = kappa^-1 (lam_k - lam_{k-1}) * Id,   lam_0 = 0,
//! for the eigenvalue tuple lam_1 >= ... >= lam_n (weakly decreasing default).
//!
//! `encode` builds the representative directly in polystable form: a "core"
//! obtained by successively quotienting by eigen-kernels (numerically: SVD
//! factorizations truncated at ranks prescribed by the Jordan type), padded by
//! one-dimensional chain summands ("strings") that carry the level scalars but
//! do not couple to the framing. Starting in the closed gauge orbit is what
//! makes the balance flow converge at nilpotent and defective inputs, where a
//! naive full-rank representative sits in a non-closed orbit and the flow only
//! reaches the zero level set in the limit.

use ndarray::{Array1, Array2};
use ndarray_linalg::{c64, Eigh, Solve, UPLO, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint, eig_real_check, eye, fro_norm, jordan_type, CMat, JordanType, SpectralData, Tolerances,
};
use crate::quiver::{gauge_act, mu, rep_norm, DimensionVector, GaugeElement, MomentValue, QuiverRep};

/// Sign and scalar conventions tying the quiver model to matrices. The
/// defaults are the frozen ones; the negative-control suites instantiate
/// broken copies to prove the endpoint checks are sensitive.
#[derive(Debug, Clone, Copy)]
pub struct Conventions {
    /// decode(rep) = kappa * y * x
    pub kappa: c64,
    /// multiplies every per-vertex level scalar; +1 is the frozen convention
    pub level_sign: f64,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions { kappa: c64::new(0.0, 1.0), level_sign: 1.0 }
    }
}

/// Convergence record of one balance run. Accepted steps decrease the
/// residual strictly; `step_history` holds `(step size, residual)` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalanceReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub step_history: Vec<(f64, f64)>,
    pub converged: bool,
}

impl BalanceReport {
    fn fresh(residual: f64, tol: f64) -> Self {
        BalanceReport {
            iterations: 0,
            final_residual: residual,
            step_history: vec![(0.0, residual)],
            converged: residual <= tol,
        }
    }
}

/// A matrix encoded as a quiver representative together with its spectral
/// parameter and balance diagnostics. Serializes through
/// [`crate::json::EncodedPointJson`].
#[derive(Debug, Clone)]
pub struct EncodedPoint {
    pub rep: QuiverRep,
    pub zeta: SpectralData,
    pub balance: BalanceReport,
    /// unit-modulus decode constant, stored for replay
    pub kappa: (f64, f64),
}

impl EncodedPoint {
    /// Decode with the point's stored convention constant.
    pub fn decode(&self) -> CMat {
        let conv = Conventions { kappa: c64::new(self.kappa.0, self.kappa.1), level_sign: 1.0 };
        decode_with(&self.rep, &conv)
    }
}

/// Per-vertex scalars prescribing the complex moment level for an ordered
/// eigenvalue tuple: `s_k = level_sign * kappa^-1 (lam_k - lam_{k-1})`.
pub fn spectral_level_ordered(order: &[f64], conv: &Conventions) -> Vec<c64> {
    let kinv = c64::new(1.0, 0.0) / conv.kappa;
    let mut prev = 0.0;
    order
        .iter()
        .map(|&l| {
            let s = kinv * c64::new(conv.level_sign * (l - prev), 0.0);
            prev = l;
            s
        })
        .collect()
}

/// Level targets for a clustered spectrum under the default (weakly
/// decreasing) ordering.
pub fn spectral_level(zeta: &SpectralData, conv: &Conventions) -> Vec<c64> {
    spectral_level_ordered(&zeta.expand_descending(), conv)
}

/// `|| mu_C(rep) - level ||_F` summed over vertices.
pub fn level_residual(rep: &QuiverRep, order: &[f64], conv: &Conventions) -> Result<f64> {
    let m = mu(rep)?;
    Ok(level_residual_of(&m, rep, order, conv))
}

fn level_residual_of(m: &MomentValue, rep: &QuiverRep, order: &[f64], conv: &Conventions) -> f64 {
    let levels = spectral_level_ordered(order, conv);
    let mut acc = 0.0;
    for (k, block) in m.complex.iter().enumerate() {
        let d = rep.dims.v[k];
        let diff = block - &(eye(d) * levels[k]);
        acc += fro_norm(&diff).powi(2);
    }
    acc.sqrt()
}

/// decode(rep) = kappa * y * x.
pub fn decode(rep: &QuiverRep) -> CMat {
    decode_with(rep, &Conventions::default())
}

pub fn decode_with(rep: &QuiverRep, conv: &Conventions) -> CMat {
    rep.yw.dot(&rep.xw).mapv(|z| z * conv.kappa)
}

fn trunc_factor(a: &CMat, r: usize) -> Result<(CMat, CMat, f64)> {
    let (rows, cols) = a.dim();
    if r == 0 {
        return Ok((Array2::zeros((rows, 0)), Array2::zeros((0, cols)), fro_norm(a)));
    }
    let (u, s, vt) = a.svd(true, true)?;
    let u = u.expect("svd u");
    let vt = vt.expect("svd vt");
    let dropped = if r < s.len() {
        s.iter().skip(r).map(|x| x * x).sum::<f64>().sqrt()
    } else {
        0.0
    };
    let mut b = Array2::zeros((rows, r));
    let mut c = Array2::zeros((r, cols));
    for j in 0..r {
        let root = s[j].max(0.0).sqrt();
        for i in 0..rows {
            b[(i, j)] = u[(i, j)] * root;
        }
        for i in 0..cols {
            c[(j, i)] = vt[(j, i)] * root;
        }
    }
    Ok((b, c, dropped))
}

struct PaddingInterval {
    start: usize, // vertex, 0-indexed
    end: usize,   // inclusive, 0-indexed
}

/// Skyline decomposition of the per-vertex deficits into legal padding
/// intervals. An interval [j, t] is legal iff lam_{t+1} == lam_j (1-indexed
/// boundary eigenvalues; lam_0 := 0), which is exactly when the string's
/// one-dimensional chain can carry the level scalars with a balanced rung.
fn padding_intervals(deficit: &[usize], order: &[f64], radius: f64) -> Result<Vec<PaddingInterval>> {
    let n = deficit.len();
    let boundary = |j: usize| if j == 0 { 0.0 } else { order[j - 1] };
    let mut open: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let mut prev = 0usize;
    for k in 0..=n {
        let cur = if k < n { deficit[k] } else { 0 };
        if cur > prev {
            open.extend(std::iter::repeat(k).take(cur - prev));
        } else if cur < prev {
            for _ in 0..(prev - cur) {
                let t = k - 1; // interval ends at vertex k-1 (0-indexed)
                let lam_t = order[t];
                let pos = open
                    .iter()
                    .rposition(|&j| (lam_t - boundary(j)).abs() <= radius)
                    .ok_or(Error::TemplateResidual { residual: (lam_t - boundary(*open.last().unwrap())).abs(), bound: radius })?;
                let j = open.remove(pos);
                out.push(PaddingInterval { start: j, end: t });
            }
        }
        prev = cur;
    }
    Ok(out)
}

/// Build the polystable representative of `M` for the given eigenvalue
/// ordering. Returns the representative and the construction certificate
/// (largest truncated singular mass).
fn build_rep(
    m: &CMat,
    order: &[f64],
    spec: &SpectralData,
    jt: &JordanType,
    tol: &Tolerances,
    conv: &Conventions,
) -> Result<(QuiverRep, f64)> {
    let n = m.dim().0;
    let dims = DimensionVector::matrix_model(n);
    // cluster centers are member means and accurate to round-off even when a
    // defective cluster's eigenvalues split; matching centers (and deciding
    // whether zero is in the spectrum) therefore uses the unfloored radius,
    // not the defect-widened one
    let radius = tol.cluster * (1.0 + fro_norm(m));
    let mut cert: f64 = 0.0;

    // working partitions per cluster center; consumed as the tower peels
    let mut working: Vec<(f64, Vec<usize>)> = jt.blocks.clone();
    let mut take_parts = |center: f64| -> usize {
        for (c, p) in working.iter_mut() {
            if (*c - center).abs() <= radius.max(1e-12) {
                let g = p.len();
                *p = p.iter().filter_map(|&x| if x > 1 { Some(x - 1) } else { None }).collect();
                return g;
            }
        }
        0
    };

    // step 0: compress W -> V_1 by the kernel of M when 0 is in the spectrum
    let zero_center = spec.values.iter().copied().find(|c| c.abs() <= radius);
    let g0 = zero_center.map(&mut take_parts).unwrap_or(0);
    let r0 = n - g0;

    let mut core_dims = vec![r0];
    let (mut xw, mut yw);
    let mut cur: CMat; // induced matrix on the current core vertex
    if r0 == 0 {
        xw = Array2::zeros((0, n));
        yw = Array2::zeros((n, 0));
        cur = Array2::zeros((0, 0));
    } else {
        let (_, s, vt) = m.svd(false, true)?;
        let vt = vt.expect("svd vt");
        if r0 < s.len() {
            cert = cert.max(s.iter().skip(r0).map(|x| x * x).sum::<f64>().sqrt());
        }
        // V: n x r0 orthonormal basis of ker(M)^perp (leading right-singular vectors)
        let v = Array2::from_shape_fn((n, r0), |(i, j)| vt[(j, i)].conj());
        xw = adjoint(&v);
        yw = m.dot(&v).mapv(|z| z / conv.kappa);
        // scale so ||x|| = ||y||; a scalar gauge, keeps y x fixed
        let (nx, ny) = (fro_norm(&xw), fro_norm(&yw));
        if nx > 0.0 && ny > 0.0 {
            let c = (ny / nx).sqrt();
            xw = xw.mapv(|z| z * c);
            yw = yw.mapv(|z| z / c);
        }
        cur = adjoint(&v).dot(m).dot(&v);
    }

    // peel tower: vertex-k equation fixes Y_k X_k = kappa^-1 (cur - lam_k)
    let mut core_x: Vec<CMat> = Vec::new();
    let mut core_y: Vec<CMat> = Vec::new();
    for k in 0..n - 1 {
        let vk = core_dims[k];
        let lam = order[k];
        if vk == 0 {
            core_x.push(Array2::zeros((0, 0)));
            core_y.push(Array2::zeros((0, 0)));
            core_dims.push(0);
            continue;
        }
        let g = take_parts(spec.nearest_center(lam));
        let r = vk.saturating_sub(g);
        if r > n - k - 1 {
            return Err(Error::TemplateResidual { residual: r as f64, bound: (n - k - 1) as f64 });
        }
        let kinv = c64::new(1.0, 0.0) / conv.kappa;
        let a = (&cur - &(eye(vk) * c64::new(conv.level_sign * lam, 0.0))).mapv(|z| z * kinv);
        let (b, c, dropped) = trunc_factor(&a, r)?;
        cert = cert.max(dropped);
        cur = c.dot(&b).mapv(|z| z * conv.kappa) + &(eye(r) * c64::new(conv.level_sign * lam, 0.0));
        core_x.push(c);
        core_y.push(b);
        core_dims.push(r);
    }
    // terminal consistency: the remaining induced matrix must be the scalar lam_n
    let vlast = core_dims[n - 1];
    if vlast > 0 {
        let diff = &cur - &(eye(vlast) * c64::new(conv.level_sign * order[n - 1], 0.0));
        cert = cert.max(fro_norm(&diff));
    }

    // padding strings fill the remaining dimensions
    let deficit: Vec<usize> = (0..n).map(|k| dims.v[k] - core_dims[k]).collect();
    let intervals = padding_intervals(&deficit, order, radius.max(1e-12))?;
    let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, iv) in intervals.iter().enumerate() {
        for k in iv.start..=iv.end {
            at_vertex[k].push(idx);
        }
    }
    for k in 0..n {
        debug_assert_eq!(core_dims[k] + at_vertex[k].len(), dims.v[k]);
    }

    let kinv = c64::new(1.0, 0.0) / conv.kappa;
    let boundary = |j: usize| if j == 0 { 0.0 } else { order[j - 1] };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..n - 1 {
        let (dk, dk1) = (dims.v[k], dims.v[k + 1]);
        let mut xk: CMat = Array2::zeros((dk1, dk));
        let mut yk: CMat = Array2::zeros((dk, dk1));
        let (ck, ck1) = (core_dims[k], core_dims[k + 1]);
        for i in 0..ck1 {
            for j in 0..ck {
                xk[(i, j)] = core_x[k][(i, j)];
                yk[(j, i)] = core_y[k][(j, i)];
            }
        }
        for (pos, &idx) in at_vertex[k].iter().enumerate() {
            let iv = &intervals[idx];
            if iv.end >= k + 1 {
                let pos1 = at_vertex[k + 1].iter().position(|&q| q == idx).expect("string continues");
                // rung scalar: sigma = -(lam_{k+1} - boundary) / kappa (1-indexed rung k+1)
                let sigma =
                    kinv * c64::new(-conv.level_sign * (order[k] - boundary(iv.start)), 0.0);
                let root = sigma.sqrt();
                xk[(ck1 + pos1, ck + pos)] = root;
                yk[(ck + pos, ck1 + pos1)] = root;
            }
        }
        xs.push(xk);
        ys.push(yk);
    }

    // widen the framing maps to the padded V_1
    let v1 = dims.v[0];
    let mut xw_full: CMat = Array2::zeros((v1, n));
    let mut yw_full: CMat = Array2::zeros((n, v1));
    for i in 0..r0 {
        for j in 0..n {
            xw_full[(i, j)] = xw[(i, j)];
            yw_full[(j, i)] = yw[(j, i)];
        }
    }

    let rep = QuiverRep { dims, xs, ys, xw: xw_full, yw: yw_full };
    rep.validate()?;
    Ok((rep, cert))
}

/// Encode `M` on the prescribed level set with the default (weakly
/// decreasing) eigenvalue ordering.
pub fn encode(m: &CMat, tol: &Tolerances) -> Result<EncodedPoint> {
    encode_with(m, tol, None, &Conventions::default())
}

/// Encode with an explicit eigenvalue ordering (entries must enumerate the
/// clustered spectrum with multiplicity) or broken conventions; used by the
/// ordering-independence and negative-control suites.
pub fn encode_with(
    m: &CMat,
    tol: &Tolerances,
    order: Option<&[f64]>,
    conv: &Conventions,
) -> Result<EncodedPoint> {
    let spec = eig_real_check(m, tol)?;
    let jt = jordan_type(m, tol)?;
    let default_order;
    let order: &[f64] = match order {
        Some(o) => {
            if o.len() != spec.n() {
                return Err(Error::Validation(format!(
                    "ordering has {} entries for an {}-dimensional spectrum",
                    o.len(),
                    spec.n()
                )));
            }
            o
        }
        None => {
            default_order = spec.expand_descending();
            &default_order
        }
    };
    let (rep, cert) = build_rep(m, order, &spec, &jt, tol, conv)?;
    let lres = level_residual(&rep, order, conv)?;
    let dres = fro_norm(&(&decode_with(&rep, conv) - m));
    let bound = tol.residual.max(1e-12 * (1.0 + fro_norm(m).powi(2)));
    let worst = cert.max(lres).max(dres);
    if worst > bound {
        return Err(Error::TemplateResidual { residual: worst, bound });
    }
    let start_res = mu(&rep)?.real_norm();
    Ok(EncodedPoint {
        rep,
        zeta: spec,
        balance: BalanceReport::fresh(start_res, tol.residual),
        kappa: (conv.kappa.re, conv.kappa.im),
    })
}

// --- balance -----------------------------------------------------------

fn herm_from_skew(b: &CMat) -> CMat {
    // -i * (skew-hermitian) is hermitian
    b.mapv(|z| z * c64::new(0.0, -1.0))
}

fn expm_hermitian(h: &CMat, t: f64) -> Result<CMat> {
    let d = h.dim().0;
    if d == 0 {
        return Ok(h.clone());
    }
    let (w, v) = h.eigh(UPLO::Lower)?;
    let mut out: CMat = Array2::zeros((d, d));
    for a in 0..d {
        for bidx in 0..d {
            let mut acc = c64::new(0.0, 0.0);
            for k in 0..d {
                acc += v[(a, k)] * c64::new((t * w[k]).exp(), 0.0) * v[(bidx, k)].conj();
            }
            out[(a, bidx)] = acc;
        }
    }
    Ok(out)
}

fn gradient_gauge(moment: &MomentValue, eps: f64) -> Result<GaugeElement> {
    let blocks = moment
        .real
        .iter()
        .map(|b| expm_hermitian(&herm_from_skew(b), -eps))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaugeElement { blocks })
}

/// Flatten the hermitian matrices `-i mu_R,k` into real coordinates; the map
/// is an isometry so the vector 2-norm equals the moment residual.
fn mu_real_vec(moment: &MomentValue) -> Array1<f64> {
    let mut out = Vec::new();
    let s2 = std::f64::consts::SQRT_2;
    for b in &moment.real {
        let h = herm_from_skew(b);
        let d = h.dim().0;
        for i in 0..d {
            out.push(h[(i, i)].re);
        }
        for i in 0..d {
            for j in (i + 1)..d {
                out.push(s2 * h[(i, j)].re);
                out.push(s2 * h[(i, j)].im);
            }
        }
    }
    Array1::from_vec(out)
}

fn herm_basis_dim(d: usize) -> usize {
    d * d
}

/// Hermitian basis element `idx` of a d x d space, matching the coordinate
/// layout of [`mu_real_vec`].
fn herm_basis_elem(d: usize, idx: usize) -> CMat {
    let mut h: CMat = Array2::zeros((d, d));
    let s2inv = 1.0 / std::f64::consts::SQRT_2;
    if idx < d {
        h[(idx, idx)] = c64::new(1.0, 0.0);
        return h;
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            if idx == k {
                h[(i, j)] = c64::new(s2inv, 0.0);
                h[(j, i)] = c64::new(s2inv, 0.0);
                return h;
            }
            if idx == k + 1 {
                h[(i, j)] = c64::new(0.0, s2inv);
                h[(j, i)] = c64::new(0.0, -s2inv);
                return h;
            }
            k += 2;
        }
    }
    unreachable!("hermitian basis index out of range")
}

struct FlowState {
    rep: QuiverRep,
    residual: f64,
    history: Vec<(f64, f64)>,
    iterations: usize,
}

/// Exponential-step gradient descent on `||mu_R||^2` with Armijo backtracking;
/// the step grows on acceptance. Accepted steps strictly decrease the residual.
fn gradient_phase(state: &mut FlowState, tol_res: f64, max_iter: usize) -> Result<()> {
    let mut eps = 0.1 / (1.0 + rep_norm(&state.rep).powi(2));
    while state.residual > tol_res && state.iterations < max_iter {
        let moment = mu(&state.rep)?;
        let mut accepted = false;
        let mut e = eps;
        for _ in 0..60 {
            let g = gradient_gauge(&moment, e)?;
            let cand = gauge_act(&state.rep, &g)?;
            let cres = mu(&cand)?.real_norm();
            if cres < state.residual
                && cres * cres <= state.residual * state.residual * (1.0 - 1e-4 * e.min(1.0))
            {
                state.rep = cand;
                state.residual = cres;
                state.iterations += 1;
                state.history.push((e, cres));
                eps = (e * 1.5).min(1e3);
                accepted = true;
                break;
            }
            e *= 0.5;
        }
        if !accepted {
            return Ok(()); // stalled; caller decides what to do next
        }
    }
    Ok(())
}

/// Levenberg-Marquardt Gauss-Newton on the log-gauge parameters, with a
/// finite-difference Jacobian. Quadratic close to a balanced representative;
/// also the workhorse once the gradient phase slows down.
fn newton_phase(state: &mut FlowState, tol_res: f64, max_iter: usize) -> Result<()> {
    let dims = state.rep.dims.clone();
    let nparam: usize = dims.v.iter().map(|&d| herm_basis_dim(d)).sum();
    if nparam == 0 {
        return Ok(());
    }
    let mut lm = 1e-8;
    let mut res_vec = mu_real_vec(&mu(&state.rep)?);
    while state.residual > tol_res && state.iterations < max_iter {
        let rn = state.residual;
        let fd = 1e-7 * rn.sqrt().max(1.0);
        let nres = res_vec.len();
        let mut jac = Array2::<f64>::zeros((nres, nparam));
        let mut col = 0;
        for (k, &d) in dims.v.iter().enumerate() {
            for b in 0..herm_basis_dim(d) {
                let e = herm_basis_elem(d, b);
                let mut g = GaugeElement::identity(&dims);
                g.blocks[k] = expm_hermitian(&e, fd)?;
                let pert = gauge_act(&state.rep, &g)?;
                let pvec = mu_real_vec(&mu(&pert)?);
                for i in 0..nres {
                    jac[(i, col)] = (pvec[i] - res_vec[i]) / fd;
                }
                col += 1;
            }
        }
        let jt = jac.t();
        let jtj = jt.dot(&jac);
        let jtr = jt.dot(&res_vec);
        let mut improved = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for i in 0..nparam {
                a[(i, i)] += lm;
            }
            let step = match a.solve(&jtr.mapv(|x| -x)) {
                Ok(s) => s,
                Err(_) => {
                    lm *= 10.0;
                    continue;
                }
            };
            let mut g = GaugeElement::identity(&dims);
            let mut off = 0;
            for (k, &d) in dims.v.iter().enumerate() {
                let mut h: CMat = Array2::zeros((d, d));
                for b in 0..herm_basis_dim(d) {
                    let e = herm_basis_elem(d, b);
                    h = h + &e.mapv(|z| z * c64::new(step[off + b], 0.0));
                }
                off += herm_basis_dim(d);
                g.blocks[k] = expm_hermitian(&h, 1.0)?;
            }
            let cand = gauge_act(&state.rep, &g)?;
            let cmoment = mu(&cand)?;
            let cres = cmoment.real_norm();
            if cres < rn {
                state.rep = cand;
                state.residual = cres;
                state.iterations += 1;
                state.history.push((lm, cres));
                res_vec = mu_real_vec(&cmoment);
                lm = (lm * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lm *= 10.0;
        }
        if !improved {
            return Ok(()); // stalled
        }
    }
    Ok(())
}

/// Drive `||mu_R||` to `tol.residual` inside the gauge orbit.
///
/// Returns the balanced representative and the convergence report; the report
/// has `converged = false` when the iteration budget ran out. A flow that
/// stalls far above the target signals a representative outside the closed
/// orbit locus and surfaces as [`Error::DivergingFlow`].
pub fn balance(rep: &QuiverRep, tol: &Tolerances, max_iter: usize) -> Result<(QuiverRep, BalanceReport)> {
    rep.validate()?;
    let start = mu(rep)?.real_norm();
    let mut state = FlowState {
        rep: rep.clone(),
        residual: start,
        history: vec![(0.0, start)],
        iterations: 0,
    };
    let target = tol.residual;
    if state.residual <= target {
        return Ok((state.rep, BalanceReport {
            iterations: 0,
            final_residual: state.residual,
            step_history: state.history,
            converged: true,
        }));
    }
    // warm up with cheap first-order steps, then polish quadratically
    let warmup = max_iter.min(150);
    gradient_phase(&mut state, target, warmup)?;
    if state.residual > target {
        newton_phase(&mut state, target, max_iter)?;
    }
    if state.residual > target && state.iterations < max_iter {
        // both phases stalled before exhausting the budget
        if state.residual > 1e4 * target {
            return Err(Error::DivergingFlow { residual: state.residual, target });
        }
    }
    let converged = state.residual <= target;
    Ok((state.rep, BalanceReport {
        iterations: state.iterations,
        final_residual: state.residual,
        step_history: state.history,
        converged,
    }))
}

/// Encode and balance in one step; fails with [`Error::BalanceFailure`] when
/// the flow does not reach the residual target.
pub fn encode_balanced(m: &CMat, tol: &Tolerances, max_iter: usize) -> Result<EncodedPoint> {
    encode_balanced_with(m, tol, max_iter, None, &Conventions::default())
}

pub fn encode_balanced_with(
    m: &CMat,
    tol: &Tolerances,
    max_iter: usize,
    order: Option<&[f64]>,
    conv: &Conventions,
) -> Result<EncodedPoint> {
    let mut pt = encode_with(m, tol, order, conv)?;
    let (rep, report) = balance(&pt.rep, tol, max_iter)?;
    if !report.converged {
        return Err(Error::BalanceFailure {
            residual: report.final_residual,
            iterations: report.iterations,
        });
    }
    pt.rep = rep;
    pt.balance = report;
    Ok(pt)
}
