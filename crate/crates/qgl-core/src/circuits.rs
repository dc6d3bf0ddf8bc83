//! Dense gate-level realizations of the block-encoding circuits.
//!
//! Registers are ordered most-significant first: Boltzmann flag qubit,
//! frequency register (signed-binary labels), jump-label register, system,
//! and for the doubled walk an extra selector qubit in front plus a mirror
//! system register at the back. All gates are kept as full-dimension dense
//! unitaries; composites are plain matrix products, checked unitary to
//! 1e-10.

use crate::discriminant;
use crate::generator::LindbladSpec;
use crate::model::{FilterFunction, SpectralGrid, TransitionWeight};
use crate::numkit::{self, c, CMat, Superoperator};
use crate::oft;
use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("cannot complete a unitary from a zero first column")]
    NonUnitaryCompletion,
    #[error("rescaled jump operator deviates from unitary by {0:.3e}")]
    NonUnitaryJumps(f64),
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("incompatible circuit spec: {0}")]
    IncompatibleSpec(String),
    #[error("eigenvector distance {0:.4} above 1/10 at beta={1:.4}")]
    EigvecDistTooLarge(f64, f64),
    #[error(transparent)]
    Num(#[from] numkit::NumError),
    #[error(transparent)]
    Oft(#[from] oft::OftError),
    #[error(transparent)]
    Generator(#[from] crate::generator::GeneratorError),
    #[error(transparent)]
    Discriminant(#[from] discriminant::DiscriminantError),
}

pub type Result<T> = std::result::Result<T, CircuitError>;

/// Ordered register segments, most significant first.
#[derive(Clone, Debug, Serialize)]
pub struct Register {
    pub segments: Vec<(String, usize)>,
}

impl Register {
    pub fn total_qubits(&self) -> usize {
        self.segments.iter().map(|(_, q)| q).sum()
    }

    pub fn dim(&self) -> usize {
        1usize << self.total_qubits()
    }
}

/// Named dense gates over a fixed register; the composite applies the gates
/// in list order (first gate acts first).
pub struct GateProgram {
    pub register: Register,
    pub gates: Vec<(String, CMat)>,
}

impl GateProgram {
    pub fn composite(&self) -> CMat {
        let d = self.register.dim();
        let mut acc = numkit::identity(d);
        for (_, g) in &self.gates {
            acc = g.dot(&acc);
        }
        acc
    }

    pub fn unitarity_residual(&self) -> f64 {
        let u = self.composite();
        numkit::max_abs(&(&numkit::dagger(&u).dot(&u) - &numkit::identity(u.nrows())))
    }

    /// Gate list as JSON records `{gate_name, params, targets}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct GateRecord<'a> {
            gate_name: &'a str,
            params: Vec<f64>,
            targets: Vec<&'a str>,
        }
        let records: Vec<GateRecord> = self
            .gates
            .iter()
            .map(|(name, _)| GateRecord {
                gate_name: name,
                params: vec![],
                targets: self.register.segments.iter().map(|(n, _)| n.as_str()).collect(),
            })
            .collect();
        serde_json::to_string(&records).expect("gate list serialization")
    }
}

/// `Y_θ = [[√(1−θ), −√θ], [√θ, √(1−θ)]]`.
pub fn y_theta(theta: f64) -> CMat {
    let ct = (1.0 - theta).max(0.0).sqrt();
    let st = theta.max(0.0).sqrt();
    ndarray::array![[c(ct, 0.0), c(-st, 0.0)], [c(st, 0.0), c(ct, 0.0)]]
}

/// Complete a unit first column to a unitary by Gram-Schmidt against the
/// standard basis, taken in a fixed order for determinism.
pub fn complete_unitary(first_column: &[C64]) -> Result<CMat> {
    let d = first_column.len();
    let norm: f64 = first_column.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(CircuitError::NonUnitaryCompletion);
    }
    let mut cols: Vec<Vec<C64>> = vec![first_column.iter().map(|z| z / norm).collect()];
    for basis in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v: Vec<C64> = vec![c(0.0, 0.0); d];
        v[basis] = c(1.0, 0.0);
        for col in &cols {
            let ov: C64 = col.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for i in 0..d {
                v[i] -= ov * col[i];
            }
        }
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    if cols.len() != d {
        return Err(CircuitError::NonUnitaryCompletion);
    }
    let mut u = CMat::zeros((d, d));
    for (j, col) in cols.iter().enumerate() {
        for i in 0..d {
            u[[i, j]] = col[i];
        }
    }
    Ok(u)
}

/// `Prep_f |0̄⟩ = Σ_t̄ f(t̄)|t̄⟩`, completed to a unitary.
pub fn build_prep(filter: &FilterFunction) -> Result<CMat> {
    complete_unitary(&filter.values)
}

/// `QFT: |t̄⟩ → N^{−1/2} Σ_ω̄ e^{−iω̄t̄} |ω̄⟩` in the signed-label convention.
pub fn build_qft(grid: &SpectralGrid) -> CMat {
    let n = grid.n;
    let scale = 1.0 / (n as f64).sqrt();
    let mut q = CMat::zeros((n, n));
    for w in 0..n {
        for t in 0..n {
            q[[w, t]] = C64::from_polar(scale, -grid.omega(w) * grid.time(t));
        }
    }
    q
}

/// `W = Σ_ω̄ Y_{1−γ(ω̄)} ⊗ |ω̄⟩⟨ω̄|` on (boltzmann, frequency).
pub fn build_weight_rot(weight: &TransitionWeight, grid: &SpectralGrid) -> CMat {
    let n = grid.n;
    let mut w = CMat::zeros((2 * n, 2 * n));
    for idx in 0..n {
        let y = y_theta(1.0 - weight.values[idx]);
        for a in 0..2 {
            for b in 0..2 {
                w[[a * n + idx, b * n + idx]] = y[[a, b]];
            }
        }
    }
    w
}

/// `Σ_t̄ |t̄⟩⟨t̄| ⊗ e^{sign·i·t̄·H}` on (frequency, system), built exactly in
/// the Hamiltonian eigenbasis.
pub fn build_ctrl_ham(ctx: &crate::model::GibbsContext, grid: &SpectralGrid, sign: f64) -> CMat {
    let n = grid.n;
    let d = ctx.dim();
    let v = &ctx.vectors;
    let vd = numkit::dagger(v);
    let mut out = CMat::zeros((n * d, n * d));
    for t in 0..n {
        let time = grid.time(t);
        let mut phase = CMat::zeros((d, d));
        for (i, &e) in ctx.energies.iter().enumerate() {
            phase[[i, i]] = C64::from_polar(1.0, sign * e * time);
        }
        let block = v.dot(&phase).dot(&vd);
        for a in 0..d {
            for b in 0..d {
                out[[t * d + a, t * d + b]] = block[[a, b]];
            }
        }
    }
    out
}

fn kron_id_left(m: &CMat, left_dim: usize) -> CMat {
    numkit::kron(&numkit::identity(left_dim), m)
}

fn kron_id_right(m: &CMat, right_dim: usize) -> CMat {
    numkit::kron(m, &numkit::identity(right_dim))
}

/// Layout data of the Lindbladian block-encoding.
pub struct BlockEncoding {
    pub program: GateProgram,
    /// Dimensions: boltzmann flag, frequency, jump, system.
    pub freq_dim: usize,
    pub jump_dim: usize,
    pub sys_dim: usize,
}

impl BlockEncoding {
    pub fn total_dim(&self) -> usize {
        2 * self.freq_dim * self.jump_dim * self.sys_dim
    }

    /// Extract the encoded block: rows over (frequency, jump, system) with
    /// the flag projected to |0⟩, columns over the system with every
    /// ancilla prepared in |0⟩.
    pub fn block(&self) -> CMat {
        let u = self.program.composite();
        let rows = self.freq_dim * self.jump_dim * self.sys_dim;
        let mut out = CMat::zeros((rows, self.sys_dim));
        for r in 0..rows {
            for s in 0..self.sys_dim {
                out[[r, s]] = u[[r, s]];
            }
        }
        out
    }

    /// Lindblad operators `√γ(ω̄) Â^a(ω̄)` in register order (frequency
    /// major, jump minor), for comparison against the block.
    pub fn expected_block(&self, spec: &LindbladSpec) -> Result<CMat> {
        let family = oft::oft_discrete(&spec.jumps, &spec.filter, &spec.grid, &spec.context)?;
        let rows = self.freq_dim * self.jump_dim * self.sys_dim;
        let mut out = CMat::zeros((rows, self.sys_dim));
        for w in 0..self.freq_dim {
            let sqrt_gamma = spec.weight.values[w].sqrt();
            for a in 0..spec.jumps.len() {
                let op = family.entry(a, w);
                for i in 0..self.sys_dim {
                    for j in 0..self.sys_dim {
                        out[[(w * self.jump_dim + a) * self.sys_dim + i, j]] =
                            op[[i, j]] * sqrt_gamma;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Assemble the Lindbladian block-encoding for unitary-normalized jumps
/// (`√|A|·A^a` unitary). Register order: flag, frequency, jump, system.
pub fn build_block_encoding(spec: &LindbladSpec) -> Result<BlockEncoding> {
    spec.validate()
        .map_err(|e| CircuitError::IncompatibleSpec(e.to_string()))?;
    let n = spec.grid.n;
    let d = spec.context.dim();
    let jumps = &spec.jumps;
    let raw_count = jumps.len();
    let jump_dim = raw_count.next_power_of_two();
    let scale = (raw_count as f64).sqrt();
    // Rescaled jumps must be unitary; padding labels carry the identity and
    // a zero preparation amplitude.
    let mut selected: Vec<CMat> = Vec::with_capacity(jump_dim);
    for (_, a) in &jumps.jumps {
        let u = a.mapv(|z| z * scale);
        let resid = numkit::max_abs(&(&numkit::dagger(&u).dot(&u) - &numkit::identity(d)));
        if resid > 1e-10 {
            return Err(CircuitError::NonUnitaryJumps(resid));
        }
        selected.push(u);
    }
    while selected.len() < jump_dim {
        selected.push(numkit::identity(d));
    }

    let freq_qubits = n.trailing_zeros() as usize;
    let jump_qubits = jump_dim.trailing_zeros() as usize;
    let register = Register {
        segments: vec![
            ("boltzmann".into(), 1),
            ("frequency".into(), freq_qubits),
            ("jump".into(), jump_qubits),
            ("system".into(), spec.context.h.qubit_count),
        ],
    };

    let mut gates: Vec<(String, CMat)> = Vec::new();
    let prep = build_prep(&spec.filter)?;
    gates.push((
        "prep_filter".into(),
        kron_id_left(&kron_id_right(&prep, jump_dim * d), 2),
    ));
    if jump_dim > 1 {
        let mut first_col = vec![c(0.0, 0.0); jump_dim];
        for item in first_col.iter_mut().take(raw_count) {
            *item = c(1.0 / scale, 0.0);
        }
        let b = complete_unitary(&first_col)?;
        gates.push((
            "prep_jump_labels".into(),
            kron_id_left(&kron_id_right(&b, d), 2 * n),
        ));
    }
    let ham_minus = build_ctrl_ham(&spec.context, &spec.grid, -1.0);
    gates.push((
        "ctrl_evolve_minus".into(),
        kron_id_left(&embed_middle_identity(&ham_minus, n, jump_dim, d), 2),
    ));
    let mut select = CMat::zeros((jump_dim * d, jump_dim * d));
    for (a, u) in selected.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                select[[a * d + i, a * d + j]] = u[[i, j]];
            }
        }
    }
    gates.push(("select_jump".into(), kron_id_left(&select, 2 * n)));
    let ham_plus = build_ctrl_ham(&spec.context, &spec.grid, 1.0);
    gates.push((
        "ctrl_evolve_plus".into(),
        kron_id_left(&embed_middle_identity(&ham_plus, n, jump_dim, d), 2),
    ));
    let qft = build_qft(&spec.grid);
    gates.push((
        "qft".into(),
        kron_id_left(&kron_id_right(&qft, jump_dim * d), 2),
    ));
    let w = build_weight_rot(&spec.weight, &spec.grid);
    gates.push(("boltzmann_rotation".into(), kron_id_right(&w, jump_dim * d)));

    Ok(BlockEncoding {
        program: GateProgram { register, gates },
        freq_dim: n,
        jump_dim,
        sys_dim: d,
    })
}

/// Embed an operator acting on (front, back) into (front, middle, back)
/// with the identity on the middle factor.
fn embed_middle_identity(op: &CMat, front: usize, middle: usize, back: usize) -> CMat {
    let total = front * middle * back;
    let mut out = CMat::zeros((total, total));
    for fi in 0..front {
        for fj in 0..front {
            for bi in 0..back {
                for bj in 0..back {
                    let v = op[[fi * back + bi, fj * back + bj]];
                    if v.norm() == 0.0 {
                        continue;
                    }
                    for m in 0..middle {
                        out[[(fi * middle + m) * back + bi, (fj * middle + m) * back + bj]] = v;
                    }
                }
            }
        }
    }
    out
}

/// The doubled-register walk unitary `U′† R U′` encoding `I + D`.
pub struct DiscriminantBlock {
    pub unitary: CMat,
    pub anc_dim: usize,
    pub sys_dim: usize,
}

impl DiscriminantBlock {
    /// Top-left block over (system, system'), all ancillas at |0⟩.
    pub fn block(&self) -> CMat {
        let dd = self.sys_dim * self.sys_dim;
        let mut out = CMat::zeros((dd, dd));
        for i in 0..dd {
            for j in 0..dd {
                out[[i, j]] = self.unitary[[i, j]];
            }
        }
        out
    }
}

/// Assemble the discriminant-proxy walk from the Lindbladian block-encoding.
/// Needs an adjoint-closed jump set and a real filter. Register order:
/// selector, flag, frequency, jump, system, system'.
pub fn build_discriminant_block(spec: &LindbladSpec) -> Result<DiscriminantBlock> {
    if spec.jumps.adjoint_permutation.is_none() {
        return Err(CircuitError::SymmetryViolation(
            "jump set lacks an adjoint involution".into(),
        ));
    }
    if !spec.filter.real_flag {
        return Err(CircuitError::SymmetryViolation("filter is not real".into()));
    }
    let base = build_block_encoding(spec)?;
    let u = base.program.composite();
    let n = base.freq_dim;
    let jump_dim = base.jump_dim;
    let d = base.sys_dim;
    let m = 2 * n * jump_dim; // flag + frequency + jump ancilla block
    let full = m * d * d; // ancillas x system x system'

    // U acting on (anc, sys), extended by identity on sys'.
    let u_sys = kron_id_right(&u, d);
    // U* acting on (anc, sys'), identity on sys.
    let u_conj = embed_conjugate_on_mirror(&u, m, d);

    let proj_plus = half_projector(1.0);
    let proj_minus = half_projector(-1.0);
    let u_prime = numkit::kron(&proj_plus, &u_sys) + numkit::kron(&proj_minus, &u_conj);

    // R = I − I⊗Π + Z ⊗ |0⟩⟨0|_flag ⊗ (F ⊗ P_jump) ⊗ I ⊗ I.
    let mut r = numkit::identity(2 * full);
    for i in 0..full {
        // Π projects the flag qubit to |0⟩: indices with flag bit 0 are the
        // first half of the ancilla block.
        if (i / (d * d)) < m / 2 {
            r[[i, i]] -= c(1.0, 0.0);
            r[[full + i, full + i]] -= c(1.0, 0.0);
        }
    }
    let perm = jump_permutation_matrix(spec, jump_dim)?;
    let mut r0_label = CMat::zeros((n * jump_dim, n * jump_dim));
    for w in 0..n {
        let wn = negation_index(&spec.grid, w);
        for (a, row) in perm.iter().enumerate() {
            r0_label[[wn * jump_dim + row.to_owned(), w * jump_dim + a]] = c(1.0, 0.0);
        }
    }
    // Z on the selector, flag fixed at |0⟩, label permutation on (freq, jump).
    let z = ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
    let flag_zero = ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    let r0 = numkit::kron(
        &z,
        &numkit::kron(&flag_zero, &kron_id_right(&r0_label, d * d)),
    );
    let r = r + r0;

    let unitary = numkit::dagger(&u_prime).dot(&r).dot(&u_prime);
    Ok(DiscriminantBlock {
        unitary,
        anc_dim: 2 * m,
        sys_dim: d,
    })
}

fn half_projector(sign: f64) -> CMat {
    // |±⟩⟨±| on the selector qubit.
    let h = 0.5;
    ndarray::array![
        [c(h, 0.0), c(sign * h, 0.0)],
        [c(sign * h, 0.0), c(h, 0.0)]
    ]
}

/// Conjugate of a unitary on (anc, sys) re-embedded to act on (anc, sys')
/// inside (anc, sys, sys').
fn embed_conjugate_on_mirror(u: &CMat, anc: usize, d: usize) -> CMat {
    let total = anc * d * d;
    let mut out = CMat::zeros((total, total));
    for ai in 0..anc {
        for aj in 0..anc {
            for ki in 0..d {
                for kj in 0..d {
                    let v = u[[ai * d + ki, aj * d + kj]].conj();
                    if v.norm() == 0.0 {
                        continue;
                    }
                    for s in 0..d {
                        out[[(ai * d + s) * d + ki, (aj * d + s) * d + kj]] = v;
                    }
                }
            }
        }
    }
    out
}

fn jump_permutation_matrix(spec: &LindbladSpec, jump_dim: usize) -> Result<Vec<usize>> {
    let perm = spec
        .jumps
        .adjoint_permutation
        .as_ref()
        .ok_or_else(|| CircuitError::SymmetryViolation("missing involution".into()))?;
    let mut full: Vec<usize> = (0..jump_dim).collect();
    for (a, &ap) in perm.iter().enumerate() {
        full[a] = ap;
    }
    Ok(full)
}

/// Index of the negated frequency label; the unpaired most-negative label of
/// an even grid is its own image (negation mod N).
fn negation_index(grid: &SpectralGrid, idx: usize) -> usize {
    let n = grid.n as i64;
    (-grid.labels[idx]).rem_euclid(n) as usize
}

/// `(Y_{1/2} ⊗ U†)(2|0^{b+1}⟩⟨0^{b+1}|⊗I − I)(Y_{1/2} ⊗ U)`: the top-left
/// block over the system equals `Σ_j L_j†L_j`.
pub fn reject_block(u: &CMat, flag_dim: usize, sys_dim: usize) -> CMat {
    let dim_u = u.nrows();
    let rest = dim_u / flag_dim;
    let y = y_theta(0.5);
    let left = numkit::kron(&y, &numkit::dagger(u));
    let right = numkit::kron(&y, u);
    let mut refl = numkit::identity(2 * dim_u).mapv(|z| z * -1.0);
    // |0^{b+1}⟩⟨0^{b+1}| spans the new qubit plus the flag register.
    for i in 0..rest {
        refl[[i, i]] += c(2.0, 0.0);
    }
    let v = left.dot(&refl).dot(&right);
    let mut out = CMat::zeros((sys_dim, sys_dim));
    for i in 0..sys_dim {
        for j in 0..sys_dim {
            out[[i, j]] = v[[i, j]];
        }
    }
    out
}

/// One weak-measurement step: apply U, rotate a fresh qubit by `arcsin √δ`
/// controlled on the flag being |0^b⟩, undo U controlled on the new qubit
/// being |0⟩, then trace out everything but the system.
pub fn weak_measure_step(
    u: &CMat,
    flag_dim: usize,
    sys_dim: usize,
    delta: f64,
    rho: &CMat,
) -> CMat {
    assert!((0.0..=1.0).contains(&delta), "delta must lie in [0, 1]");
    let dim_u = u.nrows();
    let anc = dim_u / sys_dim;
    let full = 2 * dim_u;

    // Step 1: U with the new qubit untouched.
    let step1 = numkit::kron(&numkit::identity(2), u);
    // Step 2: Y_delta on the new qubit, controlled on flag = |0^b⟩.
    let y = y_theta(delta);
    let rest = dim_u / flag_dim;
    let mut step2 = CMat::zeros((full, full));
    for i in 0..dim_u {
        let flag_is_zero = i < rest;
        for a in 0..2 {
            for b in 0..2 {
                let amp = if flag_is_zero {
                    y[[a, b]]
                } else if a == b {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                };
                if amp.norm() > 0.0 {
                    step2[[a * dim_u + i, b * dim_u + i]] = amp;
                }
            }
        }
    }
    // Step 3: U† controlled on the new qubit being |0⟩.
    let ud = numkit::dagger(u);
    let mut step3 = CMat::zeros((full, full));
    for i in 0..dim_u {
        for j in 0..dim_u {
            if ud[[i, j]].norm() > 0.0 {
                step3[[i, j]] = ud[[i, j]];
            }
        }
        step3[[dim_u + i, dim_u + i]] = c(1.0, 0.0);
    }

    let circuit = step3.dot(&step2).dot(&step1);
    // Input: |0⟩⟨0| on the new qubit and the ancillas, ρ on the system.
    let mut rho_full = CMat::zeros((full, full));
    for i in 0..sys_dim {
        for j in 0..sys_dim {
            rho_full[[i, j]] = rho[[i, j]];
        }
    }
    let evolved = circuit.dot(&rho_full).dot(&numkit::dagger(&circuit));
    trace_out_front(&evolved, 2 * anc, sys_dim)
}

/// Partial trace over the leading factor of a (front ⊗ sys) density matrix.
pub fn trace_out_front(m: &CMat, front: usize, sys: usize) -> CMat {
    let mut out = CMat::zeros((sys, sys));
    for f in 0..front {
        for i in 0..sys {
            for j in 0..sys {
                out[[i, j]] += m[[f * sys + i, f * sys + j]];
            }
        }
    }
    out
}

/// Monte-Carlo average of trajectories that sample one per-jump gadget per
/// step with the given probabilities.
#[allow(clippy::too_many_arguments)]
pub fn weak_measure_randomized(
    gadgets: &[(f64, CMat, usize)], // (probability, block-encoding, flag_dim)
    sys_dim: usize,
    delta: f64,
    rho: &CMat,
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> CMat {
    use rand::Rng;
    use rand::SeedableRng;
    let total_p: f64 = gadgets.iter().map(|(p, _, _)| p).sum();
    assert!((total_p - 1.0).abs() < 1e-9, "probabilities must sum to 1");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut mean = CMat::zeros((sys_dim, sys_dim));
    for _ in 0..trajectories {
        let mut state = rho.clone();
        for _ in 0..steps {
            let x: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = gadgets.len() - 1;
            for (idx, (p, _, _)) in gadgets.iter().enumerate() {
                acc += p;
                if x < acc {
                    chosen = idx;
                    break;
                }
            }
            let (_, u, flag_dim) = &gadgets[chosen];
            state = weak_measure_step(u, *flag_dim, sys_dim, delta, &state);
        }
        mean = mean + state;
    }
    mean.mapv(|z| z / trajectories as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnealNode {
    pub beta_j: f64,
    pub gap: f64,
    /// `‖|λ₁(D_{β_j})⟩ − |√ρ_{β_j}⟩‖`.
    pub eigvec_dist: f64,
    /// `|⟨λ₁(β_j)|λ₁(β_{j+1})⟩|²`; the last node reports 1.
    pub overlap_next: f64,
    /// Whether the 1/10 eigenvector-distance precondition holds here.
    pub dist_ok: bool,
}

/// Walk the annealing schedule `β_j = jβ/k`, building the proxy at each
/// node and reporting gaps, eigenvector distances, and consecutive
/// overlaps.
pub fn anneal_path(template: &LindbladSpec, beta: f64, k: usize) -> Result<Vec<AnnealNode>> {
    assert!(k >= 1, "need at least one annealing step");
    let mut tops: Vec<(f64, crate::numkit::CVec, f64, f64, bool)> = Vec::new();
    for j in 0..=k {
        let beta_j = beta * j as f64 / k as f64;
        let ctx = crate::model::make_context(template.context.h.clone(), beta_j)
            .map_err(|e| CircuitError::IncompatibleSpec(e.to_string()))?;
        let weight = crate::model::make_weight(template.weight.kind.clone(), beta_j, &template.grid)
            .map_err(|e| CircuitError::IncompatibleSpec(e.to_string()))?;
        let spec_j = LindbladSpec {
            jumps: template.jumps.clone(),
            filter: template.filter.clone(),
            weight,
            grid: template.grid.clone(),
            context: ctx,
        };
        let proxy = discriminant::build_proxy(&spec_j)?;
        let compare = crate::dynamics::top_eigvec_compare(&proxy, &spec_j.context.rho)
            .map_err(|e| CircuitError::IncompatibleSpec(e.to_string()))?;
        let (_, vecs) = numkit::eig_hermitian(&proxy)?;
        let top = vecs.column(0).to_owned();
        tops.push((
            beta_j,
            top,
            compare.gap,
            compare.distance,
            compare.distance <= 0.1,
        ));
    }
    let mut out = Vec::with_capacity(tops.len());
    for j in 0..tops.len() {
        let overlap_next = if j + 1 < tops.len() {
            let ov: C64 = tops[j]
                .1
                .iter()
                .zip(tops[j + 1].1.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            ov.norm_sqr()
        } else {
            1.0
        };
        out.push(AnnealNode {
            beta_j: tops[j].0,
            gap: tops[j].2,
            eigvec_dist: tops[j].3,
            overlap_next,
            dist_ok: tops[j].4,
        });
    }
    Ok(out)
}

/// Convenience: dense Lindblad operators `√γ(ω̄)Â^a(ω̄)` in the block's
/// register order, plus the assembled generator, for oracle comparisons.
pub fn lindblad_ops(spec: &LindbladSpec) -> Result<(Vec<CMat>, Superoperator)> {
    let family = oft::oft_discrete(&spec.jumps, &spec.filter, &spec.grid, &spec.context)?;
    let mut ops = Vec::new();
    for w in 0..spec.grid.n {
        let g = spec.weight.values[w].sqrt();
        for a in 0..spec.jumps.len() {
            ops.push(family.entry(a, w).mapv(|z| z * g));
        }
    }
    let l = crate::generator::build_lindbladian(spec)?;
    Ok((ops, l))
}
