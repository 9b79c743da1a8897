use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SarxError};

/// Condition estimates of `Φ H Φᵀ` above this are rejected.
pub const ILL_CONDITIONED: f64 = 1e12;

/// The affine map `ε = b − A n` from window noise to estimation error.
#[derive(Debug, Clone)]
pub struct BoundComputation {
    /// `(Φ H Φᵀ)⁻¹ Φ H`, `n × N_C`.
    pub a: DMatrix<f64>,
    /// `(Φ H Φᵀ)⁻¹ [Δŵ − Φ H □(Φ, ΔŴ)]`.
    pub b: DVector<f64>,
    /// Diagonal of `H`.
    pub h: DVector<f64>,
    /// Eigenvalue ratio of `Φ H Φᵀ`.
    pub cond: f64,
}

/// Column-wise dot products: entry `j` is `m1[:, j] · m2[:, j]`.
pub fn column_dot(m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Result<DVector<f64>> {
    if m1.shape() != m2.shape() {
        return Err(SarxError::Sizing(format!(
            "column_dot shapes differ: {:?} vs {:?}",
            m1.shape(),
            m2.shape()
        )));
    }
    Ok(DVector::from_iterator(
        m1.ncols(),
        m1.column_iter()
            .zip(m2.column_iter())
            .map(|(a, b)| a.dot(&b)),
    ))
}

/// Builds `A` and `b` from a full bound window.
///
/// `w_hist` holds, column by column, the estimate each windowed update started
/// from; `w_lag` is the estimate before the oldest windowed update (equal to
/// `w_hist[:, 0]` when the window is consistent).
pub fn assemble_bound_system(
    phi_c: &DMatrix<f64>,
    w_hist: &DMatrix<f64>,
    h_c: &DVector<f64>,
    w_now: &DVector<f64>,
    w_lag: &DVector<f64>,
) -> Result<BoundComputation> {
    let (n, nc) = phi_c.shape();
    if w_hist.shape() != (n, nc) || h_c.len() != nc || w_now.len() != n || w_lag.len() != n {
        return Err(SarxError::Sizing(format!(
            "bound window shapes disagree: Φ {:?}, W {:?}, h {}, ŵ {}, ŵ_lag {}",
            phi_c.shape(),
            w_hist.shape(),
            h_c.len(),
            w_now.len(),
            w_lag.len()
        )));
    }
    if h_c.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(SarxError::Sizing(
            "bound window has non-positive step sizes (not yet full?)".into(),
        ));
    }

    // ΔŴ = ŵ 1ᵀ − Ŵ
    let mut delta_w_hist = -w_hist.clone();
    for mut col in delta_w_hist.column_iter_mut() {
        col += w_now;
    }
    let delta_w = w_now - w_lag;

    let mut phi_h = phi_c.clone();
    for (j, mut col) in phi_h.column_iter_mut().enumerate() {
        col *= h_c[j];
    }
    let gram = &phi_h * phi_c.transpose();

    let eig = SymmetricEigen::new(gram.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| {
            (lo.min(e), hi.max(e.abs()))
        });
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(cond <= ILL_CONDITIONED) {
        return Err(SarxError::IllConditioned { cond });
    }
    let chol = gram.cholesky().ok_or(SarxError::IllConditioned { cond })?;

    let a = chol.solve(&phi_h);
    let rhs = delta_w - &phi_h * column_dot(phi_c, &delta_w_hist)?;
    let b = chol.solve(&rhs);
    Ok(BoundComputation {
        a,
        b,
        h: h_c.clone(),
        cond: cond.max(1.0),
    })
}
