//! Problem setup: Hamiltonians, jump sets, Gibbs contexts, discrete Fourier
//! grids, filter functions, and transition weights.

use crate::numkit::{self, c, CMat, CVec, DenseOperator};
use ndarray::{self as nd};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("system too large: {0} qubits (limit {1})")]
    TooLarge(usize, usize),
    #[error("grid range N*omega0 = {0:.4} below required {1:.4}")]
    RangeTooSmall(f64, f64),
    #[error("beta {0} exceeds the representable cap {1:.4}")]
    BetaTooLarge(f64, f64),
    #[error("jump normalization {0:.6} exceeds 1")]
    NormalizationExceeded(f64),
    #[error("adjoint permutation invalid: {0}")]
    BadPermutation(String),
    #[error("filter cannot be normalized (all samples zero)")]
    NotNormalizable,
    #[error("weight value {0:.4} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error(transparent)]
    Num(#[from] numkit::NumError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Clone, Debug)]
pub enum HamiltonianSpec {
    /// `Σ_i J_i Z_i Z_{i+1} + Σ_i h_i Z_i` on an open chain.
    PauliZChain {
        n: usize,
        couplings: Vec<f64>,
        fields: Vec<f64>,
    },
    Explicit(CMat),
    RandomHermitian { n: usize, seed: u64 },
}

pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<DenseOperator> {
    let mat = match spec {
        HamiltonianSpec::PauliZChain { n, couplings, fields } => {
            if *n > 5 {
                return Err(ModelError::TooLarge(*n, 5));
            }
            let dim = 1usize << n;
            let mut h = CMat::zeros((dim, dim));
            // Diagonal in the computational basis; z_i = +-1 from bit i.
            for idx in 0..dim {
                let z = |q: usize| -> f64 {
                    if (idx >> (n - 1 - q)) & 1 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                };
                let mut e = 0.0;
                for (i, j) in couplings.iter().enumerate().take(n.saturating_sub(1)) {
                    e += j * z(i) * z(i + 1);
                }
                for (i, f) in fields.iter().enumerate().take(*n) {
                    e += f * z(i);
                }
                h[[idx, idx]] = c(e, 0.0);
            }
            h
        }
        HamiltonianSpec::Explicit(m) => m.clone(),
        HamiltonianSpec::RandomHermitian { n, seed } => {
            if *n > 5 {
                return Err(ModelError::TooLarge(*n, 5));
            }
            numkit::random_hermitian(1usize << n, *seed)
        }
    };
    if numkit::hermiticity_residual(&mat) > 1e-12 {
        return Err(numkit::NumError::NonHermitianInput(numkit::hermiticity_residual(&mat)).into());
    }
    Ok(DenseOperator::new(mat)?)
}

/// Hamiltonian eigendecomposition, thermal state, purification, and the
/// table of allowed energy transitions.
#[derive(Clone, Debug)]
pub struct GibbsContext {
    pub h: DenseOperator,
    pub beta: f64,
    /// Eigenvalues, descending.
    pub energies: nd::Array1<f64>,
    /// Matching orthonormal eigenvector columns.
    pub vectors: CMat,
    pub rho: CMat,
    /// `Σ_i √p_i |ψ_i> ⊗ |ψ_i*>` on the doubled register.
    pub purification: CVec,
    /// Sorted distinct eigenvalue differences, clustered at `1e-8 ‖H‖`.
    pub bohr: Vec<f64>,
}

impl GibbsContext {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn h_norm(&self) -> f64 {
        self.energies
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max)
    }

    /// Clustering tolerance used for the Bohr table and degenerate projectors.
    pub fn degeneracy_tol(&self) -> f64 {
        1e-8 * self.h_norm().max(1.0)
    }
}

pub fn make_context(h: DenseOperator, beta: f64) -> Result<GibbsContext> {
    let (energies, vectors) = numkit::eig_hermitian(&h.mat)?;
    let h_norm = energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
    if h_norm > 0.0 && beta > 50.0 / h_norm {
        return Err(ModelError::BetaTooLarge(beta, 50.0 / h_norm));
    }
    let d = h.dim();
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();

    let mut rho = CMat::zeros((d, d));
    for (i, &p) in probs.iter().enumerate() {
        let v = vectors.column(i);
        for a in 0..d {
            for b in 0..d {
                rho[[a, b]] += v[a] * v[b].conj() * p;
            }
        }
    }

    let mut purification = CVec::from_elem(d * d, c(0.0, 0.0));
    for (i, &p) in probs.iter().enumerate() {
        let v = vectors.column(i);
        let amp = p.sqrt();
        for a in 0..d {
            for b in 0..d {
                purification[a * d + b] += v[a] * v[b].conj() * amp;
            }
        }
    }

    let tol = 1e-8 * h_norm.max(1.0);
    let mut diffs: Vec<f64> = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            diffs.push(energies[i] - energies[j]);
        }
    }
    diffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut bohr: Vec<f64> = Vec::new();
    for v in diffs {
        match bohr.last() {
            Some(&last) if (v - last).abs() <= tol => {}
            _ => bohr.push(v),
        }
    }

    Ok(GibbsContext {
        h,
        beta,
        energies,
        vectors,
        rho,
        purification,
        bohr,
    })
}

/// Round every eigenvalue toward zero to the nearest multiple of `omega0`
/// (ties at half a step resolve toward zero), keeping the eigenvectors.
/// Guarantees `‖H − H̄‖ ≤ omega0/2`.
pub fn round_hamiltonian(ctx: &GibbsContext, omega0: f64) -> DenseOperator {
    let d = ctx.dim();
    let mut rounded = CMat::zeros((d, d));
    for (i, &e) in ctx.energies.iter().enumerate() {
        let k = (e.abs() / omega0 + 0.5).floor();
        let k = if (e.abs() / omega0 + 0.5).fract() == 0.0 {
            // Exactly on a tie: step back toward zero.
            k - 1.0
        } else {
            k
        };
        let val = e.signum() * k.max(0.0) * omega0;
        let v = ctx.vectors.column(i);
        for a in 0..d {
            for b in 0..d {
                rounded[[a, b]] += v[a] * v[b].conj() * val;
            }
        }
    }
    DenseOperator::new(rounded).expect("rounded H keeps the dimension")
}

/// Discrete Fourier label sets with `N ω₀ t₀ = 2π` and labels in register
/// (two's-complement) order: `0, 1, …, ⌊(N−1)/2⌋, −⌈(N−1)/2⌉, …, −1`.
#[derive(Clone, Debug)]
pub struct SpectralGrid {
    pub n: usize,
    pub omega0: f64,
    pub t0: f64,
    pub labels: Vec<i64>,
}

impl SpectralGrid {
    pub fn omega(&self, idx: usize) -> f64 {
        self.labels[idx] as f64 * self.omega0
    }

    pub fn time(&self, idx: usize) -> f64 {
        self.labels[idx] as f64 * self.t0
    }

    /// Index carrying the negated label, when it exists (the most negative
    /// label of an even grid has no partner).
    pub fn neg_index(&self, idx: usize) -> Option<usize> {
        let target = -self.labels[idx];
        let n = self.n as i64;
        if target > (self.n as i64 - 1) / 2 {
            return None;
        }
        Some(target.rem_euclid(n) as usize)
    }

    pub fn half_range_time(&self) -> f64 {
        self.n as f64 * self.t0 / 2.0
    }
}

/// Smallest aliasing-safe frequency range for a context.
pub fn required_range(h_norm: f64, beta: f64) -> f64 {
    4.0 * h_norm + if beta > 0.0 { 2.0 / beta } else { 0.0 }
}

pub fn make_grid(n: usize, ctx: &GibbsContext, omega0_override: Option<f64>) -> Result<SpectralGrid> {
    assert!(n.is_power_of_two(), "grid size must be a power of two");
    let needed = required_range(ctx.h_norm(), ctx.beta);
    let omega0 = match omega0_override {
        Some(w) => {
            if (n as f64) * w < needed - 1e-12 {
                return Err(ModelError::RangeTooSmall(n as f64 * w, needed));
            }
            w
        }
        None => needed / n as f64,
    };
    let t0 = 2.0 * std::f64::consts::PI / (n as f64 * omega0);
    let labels: Vec<i64> = (0..n as i64)
        .map(|i| if i <= (n as i64 - 1) / 2 { i } else { i - n as i64 })
        .collect();
    Ok(SpectralGrid { n, omega0, t0, labels })
}

#[derive(Clone, Debug, PartialEq)]
pub enum FilterKind {
    /// Indicator of `−T ≤ t̄ < T`, flat amplitudes.
    Uniform { t_half: f64 },
    Gaussian { sigma_t: f64 },
    Explicit,
}

/// Time-domain weight over `S_{t0}`, ℓ₂-normalized on the discrete grid.
#[derive(Clone, Debug)]
pub struct FilterFunction {
    pub kind: FilterKind,
    /// Samples `f(t̄)` in grid register order.
    pub values: Vec<C64>,
    pub real_flag: bool,
}

impl FilterFunction {
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn make_filter(kind: FilterKind, grid: &SpectralGrid) -> Result<FilterFunction> {
    let raw: Vec<f64> = match &kind {
        FilterKind::Uniform { t_half } => grid
            .labels
            .iter()
            .map(|&l| {
                let t = l as f64 * grid.t0;
                if -t_half <= t && t < *t_half {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
        FilterKind::Gaussian { sigma_t } => grid
            .labels
            .iter()
            .map(|&l| {
                let t = l as f64 * grid.t0;
                (-t * t / (4.0 * sigma_t * sigma_t)).exp()
            })
            .collect(),
        FilterKind::Explicit => {
            return Err(ModelError::NotNormalizable);
        }
    };
    normalize_filter(kind, raw.into_iter().map(|v| c(v, 0.0)).collect())
}

pub fn explicit_filter(values: Vec<C64>) -> Result<FilterFunction> {
    normalize_filter(FilterKind::Explicit, values)
}

fn normalize_filter(kind: FilterKind, mut values: Vec<C64>) -> Result<FilterFunction> {
    let n2: f64 = values.iter().map(|z| z.norm_sqr()).sum();
    if n2 <= 0.0 {
        return Err(ModelError::NotNormalizable);
    }
    let inv = 1.0 / n2.sqrt();
    for v in values.iter_mut() {
        *v *= inv;
    }
    let real_flag = values.iter().all(|z| z.im.abs() < 1e-14);
    Ok(FilterFunction { kind, values, real_flag })
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    Metropolis,
    Glauber,
    Custom(Vec<f64>),
}

/// Boltzmann-style acceptance profile `γ(ω̄)` over the frequency labels,
/// obeying the ratio condition `γ(ω)/γ(−ω) = e^{−βω}` on paired labels.
#[derive(Clone, Debug)]
pub struct TransitionWeight {
    pub kind: WeightKind,
    pub beta: f64,
    /// Values in grid register order.
    pub values: Vec<f64>,
}

impl TransitionWeight {
    /// Metropolis profile as a function of a continuous frequency.
    pub fn gamma_fn(&self, omega: f64) -> f64 {
        match self.kind {
            WeightKind::Metropolis => (-self.beta * omega).exp().min(1.0),
            WeightKind::Glauber => 1.0 / ((self.beta * omega).exp() + 1.0),
            WeightKind::Custom(_) => panic!("custom weights have no continuous profile"),
        }
    }
}

pub fn make_weight(kind: WeightKind, beta: f64, grid: &SpectralGrid) -> Result<TransitionWeight> {
    let mut values: Vec<f64> = match &kind {
        WeightKind::Custom(v) => {
            assert_eq!(v.len(), grid.n, "custom weight table must match the grid");
            v.clone()
        }
        _ => grid
            .labels
            .iter()
            .map(|&l| {
                let w = l as f64 * grid.omega0;
                match kind {
                    WeightKind::Metropolis => (-beta * w).exp().min(1.0),
                    WeightKind::Glauber => 1.0 / ((beta * w).exp() + 1.0),
                    WeightKind::Custom(_) => unreachable!(),
                }
            })
            .collect(),
    };
    // The most negative label of an even grid has no negation partner; its
    // weight is zeroed so every retained transition keeps its reverse.
    for (i, &l) in grid.labels.iter().enumerate() {
        if grid.neg_index(i).is_none() {
            let _ = l;
            values[i] = 0.0;
        }
    }
    for &v in &values {
        if !(0.0..=1.0 + 1e-12).contains(&v) {
            return Err(ModelError::WeightOutOfRange(v));
        }
    }
    Ok(TransitionWeight { kind, beta, values })
}

/// Largest KMS-ratio violation over paired labels.
pub fn kms_residual(weight: &TransitionWeight, grid: &SpectralGrid) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..grid.n {
        if let Some(j) = grid.neg_index(i) {
            let w = grid.omega(i);
            let r = (weight.values[i] - (-weight.beta * w).exp() * weight.values[j]).abs();
            worst = worst.max(r);
        }
    }
    worst
}

/// A labeled set of jump operators, optionally closed under adjoints via an
/// explicit involution on labels.
#[derive(Clone, Debug)]
pub struct JumpSet {
    pub jumps: Vec<(String, CMat)>,
    pub adjoint_permutation: Option<Vec<usize>>,
    /// `‖Σ_a A^{a†} A^a‖`.
    pub normalization: f64,
}

impl JumpSet {
    pub fn new(jumps: Vec<(String, CMat)>, adjoint_permutation: Option<Vec<usize>>) -> Result<Self> {
        assert!(!jumps.is_empty(), "jump set cannot be empty");
        let d = jumps[0].1.nrows();
        let mut sum = CMat::zeros((d, d));
        for (_, a) in &jumps {
            sum = sum + numkit::dagger(a).dot(a);
        }
        let normalization = numkit::op_norm(&sum);
        if normalization > 1.0 + 1e-12 {
            return Err(ModelError::NormalizationExceeded(normalization));
        }
        if let Some(perm) = &adjoint_permutation {
            if perm.len() != jumps.len() {
                return Err(ModelError::BadPermutation("length mismatch".into()));
            }
            for (a, &ap) in perm.iter().enumerate() {
                if ap >= jumps.len() || perm[ap] != a {
                    return Err(ModelError::BadPermutation("not an involution".into()));
                }
                let resid = numkit::max_abs(&(&jumps[ap].1 - &numkit::dagger(&jumps[a].1)));
                if resid > 1e-12 {
                    return Err(ModelError::BadPermutation(format!(
                        "A[{}] is not the adjoint of A[{}] (residual {:.3e})",
                        ap, a, resid
                    )));
                }
            }
        }
        Ok(Self {
            jumps,
            adjoint_permutation,
            normalization,
        })
    }

    pub fn dim(&self) -> usize {
        self.jumps[0].1.nrows()
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// Sum `Σ_a A^{a†} A^a`.
    pub fn gram(&self) -> CMat {
        let d = self.dim();
        let mut sum = CMat::zeros((d, d));
        for (_, a) in &self.jumps {
            sum = sum + numkit::dagger(a).dot(a);
        }
        sum
    }
}

/// Single self-adjoint jump `X` on one qubit; the workhorse test instance
/// pairs it with `H = Z`.
pub fn single_x_jump() -> JumpSet {
    JumpSet::new(vec![("x".into(), numkit::pauli_x())], Some(vec![0])).unwrap()
}
