//! Dense Lindblad generators for small open systems.
//!
//! Density operators are stored column-stacked, which is exactly the memory
//! layout of an nalgebra `DMatrix`, so `vec(ρ)` is `ρ.as_slice()`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Vectorize a square operator (column stacking).
pub fn vectorize(op: &CMatrix) -> CVector {
    CVector::from_column_slice(op.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// `Tr(A X)` for `X` given in vectorized form.
pub fn trace_product(a: &CMatrix, x: &CVector) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            // Tr(AX) = Σ_ij A_ij X_ji, X_ji lives at column-major index i*n + j
            acc += a[(i, j)] * x[i * n + j];
        }
    }
    acc
}

pub fn trace(x: &CVector, dim: usize) -> Complex64 {
    (0..dim).map(|i| x[i * dim + i]).sum()
}

/// Generator `L` of `dρ/dt = −i[H, ρ] + Σ_k (C_k ρ C_k† − ½{C_k†C_k, ρ})`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    matrix: CMatrix,
}

impl Liouvillian {
    pub fn new(hamiltonian: &CMatrix, collapse: &[CMatrix]) -> Self {
        let dim = hamiltonian.nrows();
        let id = CMatrix::identity(dim, dim);
        let mut l = (id.kronecker(hamiltonian) - hamiltonian.transpose().kronecker(&id)) * (-I);
        for op in collapse {
            let n = op.adjoint() * op;
            l += op.conjugate().kronecker(op);
            l -= id.kronecker(&n) * c(0.5);
            l -= n.transpose().kronecker(&id) * c(0.5);
        }
        Liouvillian { dim, matrix: l }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }

    /// Row vector implementing the trace functional on vectorized operators.
    fn trace_row(&self) -> Vec<usize> {
        (0..self.dim).map(|i| i * self.dim + i).collect()
    }

    /// Unique stationary state, normalized to unit trace and Hermitized.
    ///
    /// Solves `L ρ = 0` with one equation replaced by `Tr ρ = 1`.
    pub fn steady_state(&self) -> Result<CMatrix> {
        let n = self.dim * self.dim;
        let mut a = self.matrix.clone();
        let mut b = CVector::zeros(n);
        for j in 0..n {
            a[(0, j)] = c(0.0);
        }
        for k in self.trace_row() {
            a[(0, k)] = c(1.0);
        }
        b[0] = c(1.0);
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::UndefinedModel("Liouvillian has no unique steady state".into()))?;
        let rho = unvectorize(&x, self.dim);
        let rho = (&rho + rho.adjoint()) * c(0.5);
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::UndefinedModel("non-finite steady state".into()));
        }
        Ok(rho)
    }

    /// `exp(L t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        (&self.matrix * c(t)).exp()
    }

    /// Propagate the vectorized operator `x0` to every time in `times`
    /// (non-negative, non-decreasing). Propagators are reused when
    /// consecutive steps are equal, so uniform grids cost one exponential.
    pub fn propagate_series(&self, x0: &CVector, times: &[f64]) -> Result<Vec<CVector>> {
        let mut out = Vec::with_capacity(times.len());
        let mut x = x0.clone();
        let mut t_prev = 0.0;
        let mut cached: Option<(f64, CMatrix)> = None;
        for &t in times {
            let dt = t - t_prev;
            if dt < 0.0 || !dt.is_finite() {
                return Err(Error::invalid("propagation times must be finite and non-decreasing"));
            }
            if dt > 0.0 {
                let reuse = matches!(&cached, Some((h, _)) if ((h - dt) / dt).abs() < 1e-12);
                if !reuse {
                    cached = Some((dt, self.propagator(dt)));
                }
                x = &cached.as_ref().unwrap().1 * x;
            }
            out.push(x.clone());
            t_prev = t;
        }
        Ok(out)
    }

    /// Solve `(L − P + s) y = rhs` where `P = |ρ_ss⟩⟩⟨⟨1|` projects onto the
    /// steady state. On traceless `rhs` this agrees with `(L + s)` but stays
    /// invertible at `s = 0`.
    pub fn resolvent_solve(&self, rho_ss: &CMatrix, s: Complex64, rhs: &CVector) -> Result<CVector> {
        let n = self.dim * self.dim;
        let mut a = self.matrix.clone();
        let ss = vectorize(rho_ss);
        for k in self.trace_row() {
            for i in 0..n {
                a[(i, k)] -= ss[i];
            }
        }
        for i in 0..n {
            a[(i, i)] += s;
        }
        a.lu()
            .solve(rhs)
            .ok_or_else(|| Error::UndefinedModel("singular resolvent".into()))
    }
}

/// `a ⊗ b ⊗ …` for a list of operators.
pub fn kron_all(ops: &[&CMatrix]) -> CMatrix {
    let mut acc = ops[0].clone();
    for op in &ops[1..] {
        acc = acc.kronecker(*op);
    }
    acc
}
