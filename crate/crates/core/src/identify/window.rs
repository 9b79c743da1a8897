use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

/// Pushes `col` as the newest (last) column, dropping the oldest.
pub(crate) fn push_column(m: &mut DMatrix<f64>, col: &DVector<f64>) {
    let k = m.ncols();
    if k == 0 {
        return;
    }
    for j in 0..k - 1 {
        let next = m.column(j + 1).clone_owned();
        m.set_column(j, &next);
    }
    m.set_column(k - 1, col);
}

pub(crate) fn push_value(v: &mut DVector<f64>, x: f64) {
    let k = v.len();
    if k == 0 {
        return;
    }
    for j in 0..k - 1 {
        v[j] = v[j + 1];
    }
    v[k - 1] = x;
}

/// The last `N_R` data assigned to a candidate (`Φ^R`, `y^R`), oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct KaczmarzWindow {
    pub phi: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl KaczmarzWindow {
    pub fn new(n: usize, len: usize) -> Self {
        Self {
            phi: DMatrix::zeros(n, len),
            y: DVector::zeros(len),
        }
    }

    pub fn push(&mut self, phi: &DVector<f64>, y: f64) {
        push_column(&mut self.phi, phi);
        push_value(&mut self.y, y);
    }
}

/// The last `N_C` updates of a candidate: the data used (`Φ^C`), the estimate
/// each update started from (`Ŵ^C`), the step sizes (`h^C`), and the last
/// `N_C + 1` estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundWindow {
    pub phi: DMatrix<f64>,
    pub w_hist: DMatrix<f64>,
    pub h: DVector<f64>,
    pub lag: VecDeque<DVector<f64>>,
    pub filled: usize,
}

impl BoundWindow {
    pub fn new(n: usize, len: usize, w0: &DVector<f64>) -> Self {
        let mut lag = VecDeque::with_capacity(len + 1);
        lag.push_back(w0.clone());
        Self {
            phi: DMatrix::zeros(n, len),
            w_hist: DMatrix::zeros(n, len),
            h: DVector::zeros(len),
            lag,
            filled: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.filled >= self.len()
    }

    pub fn push(
        &mut self,
        phi: &DVector<f64>,
        w_before: &DVector<f64>,
        eta: f64,
        w_after: &DVector<f64>,
    ) {
        push_column(&mut self.phi, phi);
        push_column(&mut self.w_hist, w_before);
        push_value(&mut self.h, eta);
        self.lag.push_back(w_after.clone());
        while self.lag.len() > self.len() + 1 {
            self.lag.pop_front();
        }
        self.filled = (self.filled + 1).min(self.len());
    }

    /// Estimate from `N_C` updates ago, once the window is full.
    pub fn lagged_estimate(&self) -> Option<&DVector<f64>> {
        if self.lag.len() == self.len() + 1 {
            self.lag.front()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_shifts_left() {
        let mut w = KaczmarzWindow::new(2, 3);
        for k in 1..=4 {
            w.push(
                &DVector::from_vec(vec![k as f64, -(k as f64)]),
                10.0 * k as f64,
            );
        }
        assert_eq!(
            w.phi.row(0).iter().copied().collect::<Vec<_>>(),
            vec![2.0, 3.0, 4.0]
        );
        assert_eq!(w.y.as_slice(), &[20.0, 30.0, 40.0]);
    }

    #[test]
    fn lag_tracks_window() {
        let w0 = DVector::from_vec(vec![0.0]);
        let mut b = BoundWindow::new(1, 2, &w0);
        let est = |x: f64| DVector::from_vec(vec![x]);
        b.push(&est(1.0), &est(0.0), 1.0, &est(1.0));
        assert!(!b.is_full());
        assert!(b.lagged_estimate().is_none());
        b.push(&est(1.0), &est(1.0), 1.0, &est(2.0));
        assert!(b.is_full());
        assert_eq!(b.lagged_estimate().unwrap()[0], 0.0);
        b.push(&est(1.0), &est(2.0), 1.0, &est(3.0));
        assert_eq!(b.lagged_estimate().unwrap()[0], 1.0);
        // the oldest pre-update estimate coincides with the lagged estimate
        assert_eq!(b.w_hist[(0, 0)], 1.0);
    }
}
