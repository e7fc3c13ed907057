//! Pointwise curvature of a star graph.
//!
//! In fiber chart coordinates the induced metric and second fundamental form
//! of the graph r = ψ (with respect to the outward normal) are
//!
//!   h_ij = ψ_i ψ_j + s² (g_N)_ij,
//!   B_ij = (1/W) [ s s′ (g_N)_ij + 2 (s′/s) ψ_i ψ_j − (∇²_N ψ)_ij ],
//!
//! so centered slices get principal curvatures s′/s > 0 where s grows.  The
//! principal curvatures are the eigenvalues of the pencil (B, h); from them
//! come the elementary symmetric functions σ_k, the normalized curvature
//! integrands H_k = σ_k / C(m,k), |B|², and the diagonal of the Newton
//! tensors T_k = σ_k·Id − S∘T_{k−1} in the principal frame: the entry of T_k
//! in the direction a is σ_k of the remaining principal curvatures.
//!
//! On surfaces of revolution the (meridian, parallel) directions are
//! principal, and the field keeps them in that order so divergence terms
//! along meridians can be assembled; general sphere graphs store the pair
//! in ascending order.

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::quad::NodeCoord;
use crate::special::binomial;

#[derive(Debug, Clone)]
pub struct CurvatureField {
    m: usize,
    /// Principal curvatures, m per node.
    kappas: Vec<f64>,
    /// Elementary symmetric functions σ_0..σ_m, (m+1) per node.
    sigmas: Vec<f64>,
    /// Squared norm of the shape operator, Σ κ_a².
    b2: Vec<f64>,
    revolution: bool,
    nodes: usize,
}

impl CurvatureField {
    pub fn compute(graph: &StarGraph) -> Result<CurvatureField> {
        let (profile, fiber) = graph.space().single_factor()?;
        let m = fiber.dimension();
        let n = graph.len();
        let radius = graph.grid().radius();
        let mut kappas = vec![0.0; n * m];
        for i in 0..n {
            let psi = graph.psi()[i];
            let (s, s1, _) = profile.raw(psi);
            let w = (1.0 + graph.grad_norm2(i) / (s * s)).sqrt();
            if graph.grid().is_circle() {
                let dp = graph.psi_p()[i];
                let dpp = graph.psi_pp()[i];
                let h = dp * dp + s * s * radius * radius;
                let b = (s * s1 * radius * radius + 2.0 * (s1 / s) * dp * dp - dpp) / w;
                kappas[i] = b / h;
            } else {
                let NodeCoord::Sphere { colat, .. } = graph.grid().node(i) else {
                    unreachable!()
                };
                let (st, ct) = (colat.sin(), colat.cos());
                let (dt, dp) = (graph.psi_t()[i], graph.psi_p()[i]);
                let (dtt, dtp, dpp) =
                    (graph.psi_tt()[i], graph.psi_tp()[i], graph.psi_pp()[i]);
                // Hessian of ψ on the round fiber (Christoffels of g_N).
                let hess_tt = dtt;
                let hess_tp = dtp - (ct / st) * dp;
                let hess_pp = dpp + st * ct * dt;
                let r2 = radius * radius;
                let h11 = dt * dt + s * s * r2;
                let h12 = dt * dp;
                let h22 = dp * dp + s * s * r2 * st * st;
                let b11 = (s * s1 * r2 + 2.0 * (s1 / s) * dt * dt - hess_tt) / w;
                let b12 = (2.0 * (s1 / s) * dt * dp - hess_tp) / w;
                let b22 = (s * s1 * r2 * st * st + 2.0 * (s1 / s) * dp * dp - hess_pp) / w;
                let (k1, k2) = if graph.is_revolution() {
                    // Meridian and parallel directions are principal; keep
                    // the order (meridian first).
                    (b11 / h11, b22 / h22)
                } else {
                    let pair = pencil_eigenvalues(i, h11, h12, h22, b11, b12, b22)?;
                    (pair.0.min(pair.1), pair.0.max(pair.1))
                };
                kappas[2 * i] = k1;
                kappas[2 * i + 1] = k2;
            }
        }
        let mut sigmas = vec![0.0; n * (m + 1)];
        let mut b2 = vec![0.0; n];
        for i in 0..n {
            let ks = &kappas[i * m..(i + 1) * m];
            let sig = &mut sigmas[i * (m + 1)..(i + 1) * (m + 1)];
            sig[0] = 1.0;
            for &k in ks {
                for j in (1..sig.len()).rev() {
                    sig[j] += k * sig[j - 1];
                }
                b2[i] += k * k;
            }
        }
        Ok(CurvatureField {
            m,
            kappas,
            sigmas,
            b2,
            revolution: graph.is_revolution(),
            nodes: n,
        })
    }

    /// Fiber dimension m (number of principal curvatures per node).
    pub fn fiber_dim(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Whether the principal directions are identified as
    /// (meridian, parallel).
    pub fn is_revolution(&self) -> bool {
        self.revolution
    }

    /// Principal curvatures at node i.
    pub fn kappas(&self, i: usize) -> &[f64] {
        &self.kappas[i * self.m..(i + 1) * self.m]
    }

    /// σ_k at node i.
    pub fn sigma(&self, i: usize, k: usize) -> f64 {
        assert!(k <= self.m, "σ_{k} undefined for m = {}", self.m);
        self.sigmas[i * (self.m + 1) + k]
    }

    /// Normalized invariant H_k = σ_k / C(m, k); H_0 = 1, H_1 is the mean
    /// curvature, H_m the Gauss–Kronecker curvature.
    pub fn mean_h(&self, i: usize, k: usize) -> f64 {
        self.sigma(i, k) / binomial(self.m, k)
    }

    /// |B|² = Σ_a κ_a² at node i.
    pub fn b_norm2(&self, i: usize) -> f64 {
        self.b2[i]
    }

    /// Diagonal of the Newton tensor T_k in the principal frame at node i:
    /// entry a is σ_k of the principal curvatures with κ_a removed.
    pub fn newton_diag_into(&self, i: usize, k: usize, out: &mut [f64]) {
        assert!(k < self.m || (k == 0 && self.m >= 1), "T_{k} needs k < m");
        assert_eq!(out.len(), self.m);
        let ks = self.kappas(i);
        let sig = &self.sigmas[i * (self.m + 1)..(i + 1) * (self.m + 1)];
        for (a, slot) in out.iter_mut().enumerate() {
            // σ_j(λ without a) = σ_j − λ_a σ_{j−1}(without a).
            let mut d = 1.0;
            for j in 1..=k {
                d = sig[j] - ks[a] * d;
            }
            *slot = d;
        }
    }

    pub fn newton_diag(&self, i: usize, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.newton_diag_into(i, k, &mut out);
        out
    }
}

/// Eigenvalues of the symmetric pencil (B, h) for a 2×2 metric h > 0.
fn pencil_eigenvalues(
    node: usize,
    h11: f64,
    h12: f64,
    h22: f64,
    b11: f64,
    b12: f64,
    b22: f64,
) -> Result<(f64, f64)> {
    let a = h11 * h22 - h12 * h12;
    if !(a > 0.0) {
        return Err(Error::NonFinite { node, context: "degenerate induced metric".into() });
    }
    let b = -(b11 * h22 + b22 * h11 - 2.0 * b12 * h12);
    let c = b11 * b22 - b12 * b12;
    let mut disc = b * b - 4.0 * a * c;
    // The pencil of a symmetric pair with h positive definite has real
    // eigenvalues; tolerate roundoff-scale negativity only.
    if disc < 0.0 {
        if disc > -1e-12 * (b * b + 4.0 * (a * c).abs() + 1.0) {
            disc = 0.0;
        } else {
            return Err(Error::NonFinite { node, context: "complex curvature pencil".into() });
        }
    }
    let root = disc.sqrt();
    if b == 0.0 && root == 0.0 {
        return Ok((0.0, 0.0));
    }
    let q = -0.5 * (b + b.signum() * root);
    // q ≠ 0 unless b = root = 0, handled above.
    Ok((q / a, c / q))
}
