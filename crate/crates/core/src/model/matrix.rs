use std::ops::{Add, Mul, Sub};

/// Real 2x2 matrix in the `{|H>, |V>}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[f64; 2]; 2]);

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Matrix2 = Matrix2([[0.0, 0.0], [0.0, 0.0]]);

    /// Outer product `|a><b|`.
    pub fn outer(a: [f64; 2], b: [f64; 2]) -> Self {
        Matrix2([[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        let m = self.0;
        Matrix2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = self.0;
        Matrix2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    /// `<v|M|v>` for a real vector.
    pub fn quadratic_form(&self, v: [f64; 2]) -> f64 {
        let m = self.0;
        v[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + v[1] * (m[1][0] * v[0] + m[1][1] * v[1])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn eigenvalues_symmetric(&self) -> (f64, f64) {
        let m = self.0;
        let mean = 0.5 * (m[0][0] + m[1][1]);
        let half_diff = 0.5 * (m[0][0] - m[1][1]);
        let r = half_diff.hypot(0.5 * (m[0][1] + m[1][0]));
        (mean - r, mean + r)
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (self.0, rhs.0);
        Matrix2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }
}

/// A Hermitian 2x2 operator. Every operator in this model is real, so
/// Hermitian means symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix2(Matrix2);

impl HermitianMatrix2 {
    /// Symmetrizes `m`; callers pass matrices that are already symmetric up to rounding.
    pub fn from_matrix(m: Matrix2) -> Self {
        HermitianMatrix2((m + m.transpose()).scale(0.5))
    }

    pub fn matrix(&self) -> Matrix2 {
        self.0
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.0 .0
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.0 - self.0.transpose()).max_abs() <= tol
    }
}
