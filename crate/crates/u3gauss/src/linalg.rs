//! Minimal dense linear algebra for the small systems that arise here
//! (tens of rows, at most a couple dozen columns).

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn add(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] += value;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column_norm(&self, c: usize) -> f64 {
        (0..self.rows)
            .map(|r| self.get(r, c) * self.get(r, c))
            .sum::<f64>()
            .sqrt()
    }
}

/// Solve `min ||A x - b||_2` by Householder QR for `A` with at least as many
/// rows as columns. Returns `None` when `A` is numerically rank-deficient.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n && b.len() == m);
    let mut q = a.clone();
    let mut rhs = b.to_vec();

    for k in 0..n {
        let mut norm = 0.0;
        for i in k..m {
            norm += q.get(i, k) * q.get(i, k);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if q.get(k, k) > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m - k];
        v[0] = q.get(k, k) - alpha;
        for i in k + 1..m {
            v[i - k] = q.get(i, k);
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        q.set(k, k, alpha);
        for i in k + 1..m {
            q.set(i, k, 0.0);
        }
        for j in k + 1..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * q.get(i, j)).sum();
            let scale = 2.0 * dot / vtv;
            for i in k..m {
                q.add(i, j, -scale * v[i - k]);
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * rhs[i]).sum();
        let scale = 2.0 * dot / vtv;
        for i in k..m {
            rhs[i] -= scale * v[i - k];
        }
    }

    // back substitution on the upper-triangular factor
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut sum = rhs[k];
        for j in k + 1..n {
            sum -= q.get(k, j) * x[j];
        }
        let diag = q.get(k, k);
        if diag.abs() < 1e-300 {
            return None;
        }
        x[k] = sum / diag;
    }
    Some(x)
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn norm2_squared(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_square_system() {
        let mut a = Matrix::zeros(2, 2);
        a.set(0, 0, 2.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 3.0);
        let x = least_squares(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_overdetermined() {
        // fit y = 2t + 1 through exact samples
        let ts = [0.0, 1.0, 2.0, 3.0];
        let mut a = Matrix::zeros(4, 2);
        let mut b = vec![0.0; 4];
        for (i, t) in ts.iter().enumerate() {
            a.set(i, 0, *t);
            a.set(i, 1, 1.0);
            b[i] = 2.0 * t + 1.0;
        }
        let x = least_squares(&a, &b).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_detected() {
        let mut a = Matrix::zeros(2, 2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 1.0);
        assert!(least_squares(&a, &[1.0, 2.0]).is_none());
    }
}
