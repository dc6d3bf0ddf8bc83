//! Dense complex linear-algebra kernel.
//!
//! Eigendecompositions, matrix functions, tensor products, partial traces,
//! vectorization of superoperators, and the norms the rest of the crate
//! leans on. Vectorization follows the row-stacking convention in which
//! `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.

use ndarray::{self as nd, linalg::kron as nd_kron};
use ndarray_linalg::{Eigh, OperationNorm, SVD, Solve, UPLO};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type CMat = nd::Array2<C64>;
pub type CVec = nd::Array1<C64>;

#[derive(Debug, Error)]
pub enum NumError {
    #[error("matrix is not Hermitian: residual {0:.3e}")]
    NonHermitianInput(f64),
    #[error("matrix exponential overflow at scaling stage")]
    Overflow,
    #[error("negative power of a numerically singular matrix (min eigenvalue {0:.3e})")]
    SingularNegativePower(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not positive semidefinite: min eigenvalue {0:.3e}")]
    NotPsd(f64),
    #[error("eigensolver failure: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, NumError>;

/// Hermiticity residual accepted by [`eig_hermitian`].
pub const HERM_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::eye(dim)
}

pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

pub fn trace(m: &CMat) -> C64 {
    m.diag().sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    nd_kron(a, b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) + b.dot(a)
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    let (_, s, _) = m.svd(false, false).expect("svd failed");
    s.iter().cloned().fold(0.0, f64::max)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    let (_, s, _) = m.svd(false, false).expect("svd failed");
    s.sum()
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.opnorm_fro().expect("frobenius norm failed")
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - &dagger(m)))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
/// eigenvectors as matching orthonormal columns.
pub fn eig_hermitian(m: &CMat) -> Result<(nd::Array1<f64>, CMat)> {
    let res = hermiticity_residual(m);
    if res > HERM_TOL {
        return Err(NumError::NonHermitianInput(res));
    }
    let sym = (m + &dagger(m)).mapv(|z| z * 0.5);
    let (vals, vecs) = sym
        .eigh(UPLO::Lower)
        .map_err(|e| NumError::Backend(e.to_string()))?;
    // LAPACK returns ascending order; flip to descending. The backend also
    // hands back the entrywise conjugate of the eigenvector matrix for
    // complex input, so undo that here.
    let n = vals.len();
    let vals_desc = nd::Array1::from_iter(vals.iter().rev().cloned());
    let mut vecs_desc = CMat::zeros((n, n));
    for j in 0..n {
        vecs_desc
            .column_mut(j)
            .assign(&vecs.column(n - 1 - j).mapv(|z| z.conj()));
    }
    Ok((vals_desc, vecs_desc))
}

/// Matrix exponential by scaling-and-squaring with a fixed order-13 Padé
/// approximant.
pub fn matrix_exp(m: &CMat) -> CMat {
    const THETA_13: f64 = 5.371920351148152;
    let norm1 = m.opnorm_one().expect("1-norm failed");
    if !norm1.is_finite() {
        panic!("matrix_exp: non-finite input norm");
    }
    let s = if norm1 > THETA_13 {
        (norm1 / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = m.mapv(|z| z / 2f64.powi(s));
    let mut f = pade13(&a);
    for _ in 0..s {
        f = f.dot(&f);
    }
    f
}

fn pade13(a: &CMat) -> CMat {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let d = a.nrows();
    let eye = identity(d);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let u_inner = a6.mapv(|z| z * B[13]) + a4.mapv(|z| z * B[11]) + a2.mapv(|z| z * B[9]);
    let u = a.dot(
        &(a6.dot(&u_inner)
            + a6.mapv(|z| z * B[7])
            + a4.mapv(|z| z * B[5])
            + a2.mapv(|z| z * B[3])
            + eye.mapv(|z| z * B[1])),
    );
    let v_inner = a6.mapv(|z| z * B[12]) + a4.mapv(|z| z * B[10]) + a2.mapv(|z| z * B[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * B[6])
        + a4.mapv(|z| z * B[4])
        + a2.mapv(|z| z * B[2])
        + eye.mapv(|z| z * B[0]);
    // Solve (V - U) X = (V + U) column by column.
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut x = CMat::zeros((d, d));
    for j in 0..d {
        let col = lhs
            .solve(&rhs.column(j).to_owned())
            .expect("pade13 solve failed");
        x.column_mut(j).assign(&col);
    }
    x
}

/// Real power of a positive semidefinite matrix via its eigenbasis.
/// Eigenvalues below zero (within tolerance) are clamped for p > 0;
/// negative powers demand strict positivity.
pub fn matrix_power(m: &CMat, p: f64) -> Result<CMat> {
    let (vals, vecs) = eig_hermitian(m)?;
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * (1.0 + vals[0].abs()) {
        return Err(NumError::NotPsd(min));
    }
    if p < 0.0 && min <= 1e-14 {
        return Err(NumError::SingularNegativePower(min));
    }
    let powed: Vec<C64> = vals
        .iter()
        .map(|&v| c(v.max(0.0).powf(p), 0.0))
        .collect();
    let mut scaled = vecs.clone();
    for (j, w) in powed.iter().enumerate() {
        scaled.column_mut(j).mapv_inplace(|z| z * w);
    }
    Ok(scaled.dot(&dagger(&vecs)))
}

/// Row-stacked vectorization.
pub fn vec_mat(m: &CMat) -> CVec {
    CVec::from_iter(m.iter().cloned())
}

pub fn unvec(v: &CVec, dim: usize) -> CMat {
    CMat::from_shape_vec((dim, dim), v.to_vec()).expect("unvec shape mismatch")
}

/// Dense matrix of a superoperator given as a term list `Σ c A[·]B`.
pub fn vectorize(terms: &[(C64, CMat, CMat)]) -> Result<CMat> {
    if terms.is_empty() {
        return Err(NumError::DimensionMismatch("empty term list".into()));
    }
    let d = terms[0].1.nrows();
    let mut out = CMat::zeros((d * d, d * d));
    for (coeff, left, right) in terms {
        if left.nrows() != d || right.nrows() != d || left.ncols() != d || right.ncols() != d {
            return Err(NumError::DimensionMismatch(format!(
                "term dims {}x{} / {}x{} against system dim {}",
                left.nrows(),
                left.ncols(),
                right.nrows(),
                right.ncols(),
                d
            )));
        }
        let rt = right.t().to_owned();
        out = out + kron(left, &rt).mapv(|z| z * coeff);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    Schrodinger,
    Heisenberg,
}

/// Complex square matrix on a labeled qubit register; the universal carrier
/// for states, Hamiltonians, jumps, and unitaries.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub mat: CMat,
    pub qubit_count: usize,
}

impl DenseOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        let dim = mat.nrows();
        if mat.ncols() != dim || !dim.is_power_of_two() {
            return Err(NumError::DimensionMismatch(format!(
                "{}x{} is not a square power-of-two matrix",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self {
            mat,
            qubit_count: dim.trailing_zeros() as usize,
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermiticity_residual(&self.mat) < tol
    }
}

/// Dense d²×d² matrix plus its generating term list.
#[derive(Clone, Debug)]
pub struct Superoperator {
    pub mat: CMat,
    pub terms: Vec<(C64, CMat, CMat)>,
    pub picture: Picture,
}

impl Superoperator {
    pub fn from_terms(terms: Vec<(C64, CMat, CMat)>, picture: Picture) -> Result<Self> {
        let mat = vectorize(&terms)?;
        Ok(Self { mat, terms, picture })
    }

    pub fn zero(dim: usize, picture: Picture) -> Self {
        Self {
            mat: CMat::zeros((dim * dim, dim * dim)),
            terms: vec![(c(0.0, 0.0), identity(dim), identity(dim))],
            picture,
        }
    }

    /// System dimension d (the dense matrix is d²×d²).
    pub fn dim(&self) -> usize {
        (self.mat.nrows() as f64).sqrt().round() as usize
    }

    /// Apply via the term list.
    pub fn apply(&self, x: &CMat) -> CMat {
        let d = x.nrows();
        let mut out = CMat::zeros((d, d));
        for (coeff, left, right) in &self.terms {
            out = out + left.dot(x).dot(right).mapv(|z| z * coeff);
        }
        out
    }

    /// Apply via the dense matrix (used to cross-check the term list).
    pub fn apply_dense(&self, x: &CMat) -> CMat {
        unvec(&self.mat.dot(&vec_mat(x)), x.nrows())
    }

    /// Superoperator adjoint: `(Σ c A[·]B)† = Σ c* A†[·]B†`.
    pub fn adjoint(&self) -> Superoperator {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(coeff, left, right)| (coeff.conj(), dagger(left), dagger(right)))
            .collect();
        let picture = match self.picture {
            Picture::Schrodinger => Picture::Heisenberg,
            Picture::Heisenberg => Picture::Schrodinger,
        };
        Superoperator::from_terms(terms, picture).expect("adjoint vectorization failed")
    }

    pub fn add(&self, other: &Superoperator) -> Superoperator {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Superoperator {
            mat: &self.mat + &other.mat,
            terms,
            picture: self.picture,
        }
    }

    pub fn scale(&self, s: f64) -> Superoperator {
        Superoperator {
            mat: self.mat.mapv(|z| z * s),
            terms: self
                .terms
                .iter()
                .map(|(coeff, l, r)| (coeff * s, l.clone(), r.clone()))
                .collect(),
            picture: self.picture,
        }
    }
}

/// 2-2 norm: the operator norm of the vectorized matrix (exact identity).
pub fn superop_norm_22(s: &Superoperator) -> f64 {
    op_norm(&s.mat)
}

/// Sampled lower bound on the 1-1 norm over Hermitian inputs.
///
/// Extreme points of the traceless-Hermitian trace-norm ball are
/// `(|u><u| - |v><v|)/2` with orthonormal u, v; we sample `trials` such
/// pairs, then locally refine the best one with shrinking perturbations.
/// The result never exceeds the true norm.
pub fn superop_norm_11_lb(s: &Superoperator, trials: usize, seed: u64) -> f64 {
    let d = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    let mut best_pair: Option<(CVec, CVec)> = None;
    for _ in 0..trials {
        let (u, v) = random_orthonormal_pair(d, &mut rng);
        let val = contraction_value(s, &u, &v);
        if val > best {
            best = val;
            best_pair = Some((u, v));
        }
    }
    if let Some((mut u, mut v)) = best_pair {
        let mut step = 0.3;
        for _ in 0..200 {
            let (pu, pv) = perturb_pair(&u, &v, step, &mut rng);
            let val = contraction_value(s, &pu, &pv);
            if val > best {
                best = val;
                u = pu;
                v = pv;
            } else {
                step *= 0.97;
            }
        }
    }
    best
}

/// `‖S[R]‖₁` for the unit-trace-norm extreme point built from (u, v).
pub fn contraction_value(s: &Superoperator, u: &CVec, v: &CVec) -> f64 {
    let r = rank_one_difference(u, v);
    trace_norm(&s.apply(&r))
}

/// `(|u><u| - |v><v|)/2`, trace norm exactly 1 for orthonormal u, v.
pub fn rank_one_difference(u: &CVec, v: &CVec) -> CMat {
    let d = u.len();
    let mut r = CMat::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            r[[i, j]] = (u[i] * u[j].conj() - v[i] * v[j].conj()) * 0.5;
        }
    }
    r
}

pub fn random_state(d: usize, rng: &mut impl Rng) -> CVec {
    let mut v = CVec::from_elem(d, c(0.0, 0.0));
    for z in v.iter_mut() {
        *z = c(gaussian(rng), gaussian(rng));
    }
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / n)
}

pub fn random_orthonormal_pair(d: usize, rng: &mut impl Rng) -> (CVec, CVec) {
    let u = random_state(d, rng);
    loop {
        let mut w = random_state(d, rng);
        let ov: C64 = u.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
        for i in 0..d {
            w[i] -= ov * u[i];
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            return (u, w.mapv(|z| z / n));
        }
    }
}

fn perturb_pair(u: &CVec, v: &CVec, step: f64, rng: &mut impl Rng) -> (CVec, CVec) {
    let d = u.len();
    let mut pu = u.clone();
    let mut pv = v.clone();
    for i in 0..d {
        pu[i] += c(gaussian(rng), gaussian(rng)) * step;
        pv[i] += c(gaussian(rng), gaussian(rng)) * step;
    }
    let nu = pu.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    pu.mapv_inplace(|z| z / nu);
    let ov: C64 = pu.iter().zip(pv.iter()).map(|(a, b)| a.conj() * b).sum();
    for i in 0..d {
        pv[i] -= ov * pu[i];
    }
    let nv = pv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nv < 1e-10 {
        return (u.clone(), v.clone());
    }
    pv.mapv_inplace(|z| z / nv);
    (pu, pv)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; good enough for sampling directions.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_hermitian(d: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMat::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            m[[i, j]] = c(gaussian(&mut rng), gaussian(&mut rng));
        }
    }
    (&m + &dagger(&m)).mapv(|z| z * 0.5)
}

/// Partial trace over the qubits *not* listed in `keep`. Qubit 0 is the most
/// significant factor in the tensor-product ordering. Returns a scalar 1x1
/// matrix when `keep` is empty.
pub fn partial_trace(m: &CMat, keep: &[usize], qubit_count: usize) -> Result<CMat> {
    let dim = m.nrows();
    if dim != 1 << qubit_count {
        return Err(NumError::DimensionMismatch(format!(
            "dim {} vs {} qubits",
            dim, qubit_count
        )));
    }
    if keep.iter().any(|&q| q >= qubit_count) {
        return Err(NumError::DimensionMismatch("keep index out of range".into()));
    }
    let traced: Vec<usize> = (0..qubit_count).filter(|q| !keep.contains(q)).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let assemble = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            let bit = (kept_bits >> (keep.len() - 1 - pos)) & 1;
            idx |= bit << (qubit_count - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (traced_bits >> (traced.len() - 1 - pos)) & 1;
            idx |= bit << (qubit_count - 1 - q);
        }
        idx
    };
    let mut out = CMat::zeros((kd, kd));
    for a in 0..kd {
        for b in 0..kd {
            let mut acc = c(0.0, 0.0);
            for t in 0..td {
                acc += m[[assemble(a, t), assemble(b, t)]];
            }
            out[[a, b]] = acc;
        }
    }
    Ok(out)
}

pub fn pauli_x() -> CMat {
    nd::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_y() -> CMat {
    nd::array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> CMat {
    nd::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}
