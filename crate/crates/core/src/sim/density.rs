use num_complex::Complex64;

/// Single-qubit density matrix, `entries[row][col]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2 {
    pub entries: [[Complex64; 2]; 2],
}

impl DensityMatrix2 {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Self {
        DensityMatrix2 { entries }
    }

    /// ρ₀₀.
    pub fn p0(&self) -> f64 {
        self.entries[0][0].re
    }

    /// ρ₁₁, the probability of reading 1.
    pub fn p1(&self) -> f64 {
        self.entries[1][1].re
    }

    /// |ρ₀₁|.
    pub fn coherence(&self) -> f64 {
        self.entries[0][1].norm()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let e = &self.entries;
        e[0][0].im.abs() <= tol
            && e[1][1].im.abs() <= tol
            && (e[0][1] - e[1][0].conj()).norm() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (a, d) = (self.entries[0][0].re, self.entries[1][1].re);
        let b = self.entries[0][1].norm();
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - rad, mean + rad]
    }

    /// Hermitian, unit trace, positive semidefinite (all within `tol`).
    pub fn is_valid(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol
            && self.eigenvalues()[0] >= -tol
    }
}
