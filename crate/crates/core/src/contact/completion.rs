//! Completion of full-rank rows to invertible frames along a traversal.

use nalgebra::{DMatrix, Schur};

use super::ContactError;
use crate::{c64, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionConfig {
    pub sv_floor: f64,
    /// Holonomy defects above this are repaired by a twist.
    pub holonomy_tol: f64,
    /// The samples form a closed loop (the last is followed by the first).
    pub closed: bool,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        Self {
            sv_floor: 1e-8,
            holonomy_tol: 1e-10,
            closed: false,
        }
    }
}

/// `B(p_k)` with `A(p_k)·B(p_k) = (I_m, 0)`.
#[derive(Debug, Clone)]
pub struct FrameCompletion {
    pub b: Vec<DMatrix<C64>>,
    pub inverse: Vec<DMatrix<C64>>,
    /// `max ‖B_{k+1} − B_k‖ / |p_{k+1} − p_k|`.
    pub lipschitz: f64,
    /// `‖U − I‖` for the closed-loop return map `U` of the kernel frame.
    pub holonomy: f64,
    /// Bound on the change of any `B_k` made by the repair twist.
    pub repair_bound: f64,
    /// Largest actual change.
    pub repair_change: f64,
    pub repaired: bool,
    /// `max ‖A_k B_k − (I, 0)‖`.
    pub identity_residual: f64,
}

fn lowdin(q: &DMatrix<C64>) -> Option<(DMatrix<C64>, f64)> {
    let gram = q.adjoint() * q;
    let eig = gram.symmetric_eigen();
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return None;
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| c64(1.0 / l.sqrt(), 0.0)));
    let v = &eig.eigenvectors;
    Some((q * (v * inv_sqrt * v.adjoint()), min.sqrt()))
}

fn pseudo_inverse(a: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let ah = a.adjoint();
    (a * &ah).try_inverse().map(|g| ah * g)
}

fn initial_kernel(p: &DMatrix<C64>, k: usize) -> DMatrix<C64> {
    let dim = p.nrows();
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::new();
    let mut cand: Vec<nalgebra::DVector<C64>> = (0..dim).map(|j| p.column(j).into_owned()).collect();
    while cols.len() < k {
        let (best, _) = cand
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        let v = cand[best].clone();
        let v = &v / c64(v.norm(), 0.0);
        for c in cand.iter_mut() {
            let proj = v.dotc(c);
            *c -= &v * proj;
        }
        cols.push(v);
    }
    DMatrix::from_columns(&cols)
}

fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Kernel frame propagated by projection and Löwdin re-orthonormalisation,
/// started from the pivoted projection of the standard basis; on closed
/// loops a holonomy beyond tolerance is spread out as `U^{−k/K}`.
pub fn matrix_completion(
    a: &[DMatrix<C64>],
    positions: &[C64],
    cfg: &CompletionConfig,
) -> Result<FrameCompletion, ContactError> {
    if a.is_empty() {
        return Err(ContactError::InvalidForm("no samples".into()));
    }
    let (m, p) = a[0].shape();
    if m > p || a.iter().any(|x| x.shape() != (m, p)) || positions.len() != a.len() {
        return Err(ContactError::InvalidForm("inconsistent sample shapes".into()));
    }
    let k = p - m;
    let mut plus = Vec::with_capacity(a.len());
    let mut proj = Vec::with_capacity(a.len());
    for (i, ai) in a.iter().enumerate() {
        let sigma = ai.clone().svd(false, false).singular_values.min();
        if !(sigma >= cfg.sv_floor) {
            return Err(ContactError::RankDrop { sample: i, sigma });
        }
        let pi = pseudo_inverse(ai).ok_or(ContactError::RankDrop { sample: i, sigma })?;
        proj.push(DMatrix::<C64>::identity(p, p) - &pi * ai);
        plus.push(pi);
    }
    let mut frames: Vec<DMatrix<C64>> = Vec::with_capacity(a.len());
    frames.push(initial_kernel(&proj[0], k));
    for i in 1..a.len() {
        let q = &proj[i] * &frames[i - 1];
        let (n, s) = lowdin(&q).ok_or(ContactError::RankDrop { sample: i, sigma: 0.0 })?;
        if k > 0 && s < 1e-3 {
            return Err(ContactError::RankDrop { sample: i, sigma: s });
        }
        frames.push(n);
    }

    let mut holonomy = 0.0;
    let mut repair_bound = 0.0;
    let mut repair_change = 0.0f64;
    let mut repaired = false;
    if cfg.closed && k > 0 && a.len() > 1 {
        let q = &proj[0] * frames.last().unwrap();
        let (back, _) = lowdin(&q).ok_or(ContactError::RankDrop { sample: 0, sigma: 0.0 })?;
        let u = frames[0].adjoint() * back;
        holonomy = op_norm(&(&u - DMatrix::<C64>::identity(k, k)));
        if holonomy > cfg.holonomy_tol {
            let (qs, t) = Schur::new(u).unpack();
            let phases: Vec<f64> = (0..k).map(|i| t[(i, i)].arg()).collect();
            repair_bound = phases.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let total = a.len() as f64;
            for (i, f) in frames.iter_mut().enumerate() {
                let s = i as f64 / total;
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    k,
                    phases.iter().map(|ph| C64::from_polar(1.0, -s * ph)),
                ));
                let twist = &qs * d * qs.adjoint();
                let new = &*f * twist;
                repair_change = repair_change.max(op_norm(&(&new - &*f)));
                *f = new;
            }
            repaired = true;
            // The closing jump must now be of the size of an ordinary step.
            let q = &proj[0] * frames.last().unwrap();
            let (back, _) = lowdin(&q).ok_or(ContactError::RankDrop { sample: 0, sigma: 0.0 })?;
            let closing = op_norm(&(back - &frames[0]));
            let step = frames
                .windows(2)
                .map(|w| op_norm(&(&w[1] - &w[0])))
                .fold(0.0, f64::max);
            if !(closing <= 10.0 * step + cfg.holonomy_tol) {
                return Err(ContactError::HolonomyMismatch { defect: holonomy });
            }
        }
    }

    let mut b = Vec::with_capacity(a.len());
    let mut inverse = Vec::with_capacity(a.len());
    let mut identity_residual = 0.0f64;
    let target = {
        let mut t = DMatrix::<C64>::zeros(m, p);
        for i in 0..m {
            t[(i, i)] = c64(1.0, 0.0);
        }
        t
    };
    for i in 0..a.len() {
        let mut bi = DMatrix::<C64>::zeros(p, p);
        bi.view_mut((0, 0), (p, m)).copy_from(&plus[i]);
        bi.view_mut((0, m), (p, k)).copy_from(&frames[i]);
        let mut inv = DMatrix::<C64>::zeros(p, p);
        inv.view_mut((0, 0), (m, p)).copy_from(&a[i]);
        inv.view_mut((m, 0), (k, p)).copy_from(&frames[i].adjoint());
        identity_residual = identity_residual.max(op_norm(&(&a[i] * &bi - &target)));
        b.push(bi);
        inverse.push(inv);
    }
    let mut lipschitz = 0.0f64;
    let pairs = if cfg.closed { a.len() } else { a.len() - 1 };
    for i in 0..pairs {
        let j = (i + 1) % a.len();
        let d = (positions[j] - positions[i]).norm();
        if d > 0.0 {
            lipschitz = lipschitz.max(op_norm(&(&b[j] - &b[i])) / d);
        }
    }
    Ok(FrameCompletion {
        b,
        inverse,
        lipschitz,
        holonomy,
        repair_bound,
        repair_change,
        repaired,
        identity_residual,
    })
}

/// Flat-model extension `F(x, ζ) = f(x) + Φ(x)·ζ` of an immersion.
#[derive(Debug, Clone)]
pub struct TubeExtension {
    pub f: Vec<Vec<C64>>,
    pub tangents: Vec<Vec<C64>>,
    /// `(2n+1) × 2n` normal frames.
    pub phi: Vec<DMatrix<C64>>,
    /// Smallest singular value of `[df(V) | Φ]` over the samples.
    pub min_singular: f64,
    /// Fibre radius within which the extension stays immersive.
    pub radius: f64,
    pub completion: FrameCompletion,
}

impl TubeExtension {
    pub fn eval(&self, k: usize, zeta: &[C64]) -> Vec<C64> {
        let z = nalgebra::DVector::from_column_slice(zeta);
        let v = &self.phi[k] * z;
        self.f[k].iter().zip(v.iter()).map(|(a, b)| a + b).collect()
    }

    /// `[df(V) | ∂F/∂ζ]` at sample `k`.
    pub fn jacobian(&self, k: usize) -> DMatrix<C64> {
        let dim = self.f[k].len();
        let mut j = DMatrix::<C64>::zeros(dim, dim);
        for (i, v) in self.tangents[k].iter().enumerate() {
            j[(i, 0)] = *v;
        }
        j.view_mut((0, 1), (dim, dim - 1)).copy_from(&self.phi[k]);
        j
    }
}

/// Normal frames from [`matrix_completion`] applied to `df(V)^H`.
pub fn tube_extension(
    f: &[Vec<C64>],
    tangents: &[Vec<C64>],
    positions: &[C64],
    cfg: &CompletionConfig,
) -> Result<TubeExtension, ContactError> {
    if f.len() != tangents.len() || f.is_empty() {
        return Err(ContactError::MissingTangents);
    }
    let rows: Vec<DMatrix<C64>> = tangents
        .iter()
        .map(|v| DMatrix::from_row_iterator(1, v.len(), v.iter().map(|x| x.conj())))
        .collect();
    let completion = matrix_completion(&rows, positions, cfg)?;
    let dim = f[0].len();
    let phi: Vec<DMatrix<C64>> = completion
        .b
        .iter()
        .map(|b| b.view((0, 1), (dim, dim - 1)).into_owned())
        .collect();
    let mut ext = TubeExtension {
        f: f.to_vec(),
        tangents: tangents.to_vec(),
        phi,
        min_singular: f64::INFINITY,
        radius: f64::INFINITY,
        completion,
    };
    for k in 0..f.len() {
        let s = ext.jacobian(k).svd(false, false).singular_values.min();
        ext.min_singular = ext.min_singular.min(s);
    }
    if ext.completion.lipschitz > 0.0 {
        ext.radius = ext.min_singular / (2.0 * ext.completion.lipschitz);
    }
    Ok(ext)
}
