//! Small dense linear algebra for d×d symmetric systems.
//!
//! Dimensions here are tiny (d ≲ 64), so everything is plain row-major
//! storage with a Cholesky factorization for SPD solves and cyclic Jacobi
//! rotations for the symmetric eigenproblem.

use std::ops::Index;

use crate::error::{Error, Result};

/// Pivots at or below this value abort a Cholesky factorization.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// A real vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    /// Wraps entries produced by finite arithmetic on finite inputs.
    pub(crate) fn from_finite(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Self(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A symmetric matrix. Writes go through [`SymMatrix::set`] which mirrors
/// across the diagonal, so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &v) in diag.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
            m.data[i * n + i] = v;
        }
        Ok(m)
    }

    /// Builds a matrix from the upper triangle of `f(i, j)`, `i <= j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite(i * n + j));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Accepts row-major rows that are exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidParam(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::from_upper(n, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// `self += w · x xᵀ`
    pub fn add_outer(&mut self, x: &[f64], w: f64) {
        debug_assert_eq!(x.len(), self.n);
        let n = self.n;
        for i in 0..n {
            let wi = w * x[i];
            if wi == 0.0 {
                continue;
            }
            for j in i..n {
                let v = self.data[i * n + j] + wi * x[j];
                self.set(i, j, v);
            }
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::factor(self)
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = jacobi_eigenvalues(self);
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let n = a.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut diag = a.get(j, j);
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if !(diag > PIVOT_TOLERANCE) {
                return Err(Error::SingularMatrix { row: j, pivot: diag });
            }
            let ljj = diag.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` of the lower factor; zero above the diagonal.
    pub fn lower(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.n + j]
    }

    /// `L z`
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| dot(&self.lower[i * n..i * n + i + 1], &z[..=i])).collect()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        // L y = b
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lower[i * n + k] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
        // Lᵀ x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lower[k * n + i] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
        y
    }

    /// `xᵀ A⁻¹ x` through one solve.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.solve(x)).max(0.0)
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &SymMatrix, b: &Vector) -> Result<Vector> {
    check_dim(a.dim(), b.dim())?;
    let chol = a.cholesky()?;
    Ok(Vector::from_finite(chol.solve(b.as_slice())))
}

/// `xᵀ A⁻¹ x`, computed as `x · solve_spd(A, x)`.
pub fn quad_form_inv(a: &SymMatrix, x: &Vector) -> Result<f64> {
    let y = solve_spd(a, x)?;
    Ok(x.dot(&y).max(0.0))
}

pub fn min_eigenvalue(a: &SymMatrix) -> f64 {
    jacobi_eigenvalues(a)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(a: &SymMatrix) -> f64 {
    jacobi_eigenvalues(a)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

const JACOBI_MAX_SWEEPS: usize = 100;

fn jacobi_eigenvalues(a: &SymMatrix) -> Vec<f64> {
    let n = a.n;
    let mut m = a.data.clone();
    let scale = a.norm_inf().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn sym(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn solve_identity() {
        let x = solve_spd(&SymMatrix::identity(2), &v(&[3.0, 4.0])).unwrap();
        assert_eq!(x.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn solve_diagonal() {
        let a = SymMatrix::diagonal(&[2.0, 4.0]).unwrap();
        let x = solve_spd(&a, &v(&[2.0, 4.0])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_coupled() {
        let a = sym(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let x = solve_spd(&a, &v(&[3.0, 3.0])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = sym(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let err = solve_spd(&a, &v(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { row: 1, .. }));
        assert!(SymMatrix::zeros(3).cholesky().is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let err = solve_spd(&SymMatrix::identity(3), &v(&[1.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 3, got: 1 }));
    }

    #[test]
    fn quad_form_examples() {
        let q = quad_form_inv(&SymMatrix::identity(2), &v(&[3.0, 4.0])).unwrap();
        assert!((q - 25.0).abs() < 1e-12);
        let q = quad_form_inv(&SymMatrix::diagonal(&[4.0, 1.0]).unwrap(), &v(&[2.0, 0.0])).unwrap();
        assert!((q - 1.0).abs() < 1e-15);
        let q = quad_form_inv(&sym(&[&[2.0, 1.0], &[1.0, 2.0]]), &v(&[1.0, 1.0])).unwrap();
        assert!((q - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalue_examples() {
        assert!((min_eigenvalue(&SymMatrix::diagonal(&[1.0, 3.0]).unwrap()) - 1.0).abs() < 1e-12);
        let a = sym(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!((min_eigenvalue(&a) - 1.0).abs() < 1e-12);
        assert!((max_eigenvalue(&a) - 3.0).abs() < 1e-12);
        assert_eq!(min_eigenvalue(&SymMatrix::zeros(2)), 0.0);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(Vector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1))));
        assert!(SymMatrix::diagonal(&[f64::INFINITY]).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).is_err());
    }

    #[test]
    fn add_outer_keeps_symmetry() {
        let mut a = SymMatrix::identity(3);
        a.add_outer(&[1.0, 2.0, -1.0], 0.5);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.get(i, j), a.get(j, i));
            }
        }
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(2, 2), 1.5);
    }

    #[test]
    fn lower_factor_reproduces_matrix() {
        let a = sym(&[&[4.0, 2.0, 0.4], &[2.0, 3.0, 0.5], &[0.4, 0.5, 2.0]]);
        let chol = a.cholesky().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| chol.lower(i, k) * chol.lower(j, k)).sum();
                assert!((s - a.get(i, j)).abs() < 1e-14);
            }
        }
        let z = [1.0, -2.0, 0.5];
        let lz = chol.mul_lower(&z);
        let expected: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|k| chol.lower(i, k) * z[k]).sum())
            .collect();
        assert_eq!(lz, expected);
    }
}
