use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SarxError};

/// One MIMO subsystem: `y_t = Σ_j A_j y_{t-j} + Σ_k C_k u_{t-k} + n_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoSubsystem {
    /// `na` matrices, each `ny × ny`.
    pub a: Vec<DMatrix<f64>>,
    /// `nc` matrices, each `ny × nu`.
    pub c: Vec<DMatrix<f64>>,
}

/// Scalar-output identification problem for one output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoProblem {
    pub channel: usize,
    /// `na·ny + nc·nu`.
    pub regressor_len: usize,
    /// Row `channel` of `[A_1 … A_na C_1 … C_nc]` for every subsystem.
    pub params: Vec<DVector<f64>>,
}

impl SisoProblem {
    /// Stacks `[y_{t-1}ᵀ … y_{t-na}ᵀ, u_{t-1}ᵀ … u_{t-nc}ᵀ]ᵀ` from newest-first histories.
    pub fn regressor(y_history: &[DVector<f64>], u_history: &[DVector<f64>]) -> DVector<f64> {
        let data: Vec<f64> = y_history
            .iter()
            .chain(u_history.iter())
            .flat_map(|v| v.iter().copied())
            .collect();
        DVector::from_vec(data)
    }
}

/// Splits a MIMO SARX system into `ny` independent scalar-output problems that
/// share one regressor.
pub fn mimo_decompose(
    subsystems: &[MimoSubsystem],
    ny: usize,
    nu: usize,
) -> Result<Vec<SisoProblem>> {
    let first = subsystems.first().ok_or_else(|| {
        SarxError::InvalidConfig("MIMO system needs at least one subsystem".into())
    })?;
    let (na, nc) = (first.a.len(), first.c.len());
    if ny == 0 || na + nc == 0 {
        return Err(SarxError::Sizing("MIMO system has empty dimensions".into()));
    }
    for (s, sub) in subsystems.iter().enumerate() {
        if sub.a.len() != na || sub.c.len() != nc {
            return Err(SarxError::Sizing(format!(
                "subsystem {s} has {} A and {} C matrices, expected {na} and {nc}",
                sub.a.len(),
                sub.c.len()
            )));
        }
        if let Some(j) = sub.a.iter().position(|m| m.shape() != (ny, ny)) {
            return Err(SarxError::Sizing(format!(
                "subsystem {s}: A_{} has shape {:?}, expected ({ny}, {ny})",
                j + 1,
                sub.a[j].shape()
            )));
        }
        if let Some(k) = sub.c.iter().position(|m| m.shape() != (ny, nu)) {
            return Err(SarxError::Sizing(format!(
                "subsystem {s}: C_{} has shape {:?}, expected ({ny}, {nu})",
                k + 1,
                sub.c[k].shape()
            )));
        }
    }
    let regressor_len = na * ny + nc * nu;
    Ok((0..ny)
        .map(|channel| {
            let params = subsystems
                .iter()
                .map(|sub| {
                    DVector::from_iterator(
                        regressor_len,
                        sub.a
                            .iter()
                            .chain(sub.c.iter())
                            .flat_map(|m| m.row(channel).iter().copied().collect::<Vec<_>>()),
                    )
                })
                .collect();
            SisoProblem {
                channel,
                regressor_len,
                params,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_case_matches_siso() {
        let sub = MimoSubsystem {
            a: vec![
                DMatrix::from_element(1, 1, 0.7),
                DMatrix::from_element(1, 1, -0.12),
            ],
            c: vec![DMatrix::from_element(1, 1, 1.0)],
        };
        let probs = mimo_decompose(&[sub], 1, 1).unwrap();
        assert_eq!(probs.len(), 1);
        assert_eq!(probs[0].regressor_len, 3);
        assert_eq!(probs[0].params[0].as_slice(), &[0.7, -0.12, 1.0]);
    }

    #[test]
    fn two_outputs_dimension_count() {
        let sub = MimoSubsystem {
            a: vec![DMatrix::from_row_slice(2, 2, &[0.1, 0.2, 0.3, 0.4])],
            c: vec![DMatrix::from_row_slice(2, 1, &[1.0, 2.0])],
        };
        let probs = mimo_decompose(&[sub], 2, 1).unwrap();
        assert_eq!(probs.len(), 2);
        assert!(probs.iter().all(|p| p.regressor_len == 3));
        assert_eq!(probs[1].params[0].as_slice(), &[0.3, 0.4, 2.0]);
    }

    #[test]
    fn diagonal_channels_decouple() {
        let sub = MimoSubsystem {
            a: vec![DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -0.4]))],
            c: vec![DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]))],
        };
        let probs = mimo_decompose(&[sub], 2, 2).unwrap();
        // regressor layout: [y1, y2, u1, u2]
        assert_eq!(probs[0].params[0].as_slice(), &[0.5, 0.0, 1.0, 0.0]);
        assert_eq!(probs[1].params[0].as_slice(), &[0.0, -0.4, 0.0, 2.0]);
    }

    #[test]
    fn channel_equations_reproduce_mimo_output() {
        let sub = MimoSubsystem {
            a: vec![DMatrix::from_row_slice(2, 2, &[0.3, -0.1, 0.2, 0.5])],
            c: vec![DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.7, 2.0])],
        };
        let y_prev = DVector::from_vec(vec![0.4, -1.2]);
        let u_prev = DVector::from_vec(vec![0.9, 0.1]);
        let y_now = &sub.a[0] * &y_prev + &sub.c[0] * &u_prev;
        let phi = SisoProblem::regressor(&[y_prev], &[u_prev]);
        let probs = mimo_decompose(&[sub], 2, 2).unwrap();
        for p in &probs {
            assert!((p.params[0].dot(&phi) - y_now[p.channel]).abs() < 1e-14);
        }
    }

    #[test]
    fn inconsistent_shapes_rejected() {
        let sub = MimoSubsystem {
            a: vec![DMatrix::zeros(2, 3)],
            c: vec![DMatrix::zeros(2, 1)],
        };
        assert!(mimo_decompose(&[sub], 2, 1).is_err());
    }
}
