//! Detailed-balance machinery on the doubled (vectorized) space.
//!
//! The similarity-transformed discriminant of a generator ℒ at a full-rank
//! state ρ is `ρ^{−1/4} ℒ[ρ^{1/4} · ρ^{1/4}] ρ^{−1/4}`; detailed balance is
//! its self-adjointness, and approximate detailed balance is measured by the
//! operator norm of its anti-Hermitian part. Discriminant proxies are
//! Hermitian by construction and are compared against the adjoint of the
//! true discriminant.

use crate::generator::{self, LindbladSpec};
use crate::model::TransitionWeight;
use crate::numkit::{self, CMat, CVec, Superoperator};
use crate::oft::{self, OftFamily};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscriminantError {
    #[error("state is numerically singular: min eigenvalue {0:.3e}")]
    SingularState(f64),
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("beta*mu = {0:.4} exceeds 1; the proxy error bound does not apply")]
    PreconditionBetaMu(f64),
    #[error(transparent)]
    Oft(#[from] oft::OftError),
    #[error(transparent)]
    Num(#[from] numkit::NumError),
    #[error(transparent)]
    Generator(#[from] generator::GeneratorError),
}

pub type Result<T> = std::result::Result<T, DiscriminantError>;

fn conj_mat(m: &CMat) -> CMat {
    m.mapv(|z| z.conj())
}

/// `ρ^{−1/4} ℒ[ρ^{1/4} · ρ^{1/4}] ρ^{−1/4}` as a dense matrix on the
/// doubled space. Requires ρ full rank.
pub fn similarity_discriminant(l: &Superoperator, rho: &CMat) -> Result<CMat> {
    let (vals, _) = numkit::eig_hermitian(rho)?;
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 1e-14 {
        return Err(DiscriminantError::SingularState(min));
    }
    let p_plus = numkit::matrix_power(rho, 0.25)?;
    let p_minus = numkit::matrix_power(rho, -0.25)?;
    let k_plus = numkit::kron(&p_plus, &p_plus.t().to_owned());
    let k_minus = numkit::kron(&p_minus, &p_minus.t().to_owned());
    Ok(k_minus.dot(&l.mat).dot(&k_plus))
}

/// Hermitian/anti-Hermitian split of the discriminant plus its headline
/// spectral data.
#[derive(Clone, Debug)]
pub struct DiscriminantReport {
    pub d: CMat,
    pub h_part: CMat,
    pub a_part: CMat,
    /// `‖(D − D†)/2‖`, the approximate-detailed-balance norm.
    pub adb_norm: f64,
    /// Top eigenvalue and eigenvector of the Hermitian part.
    pub lambda1: f64,
    pub top_vector: CVec,
    /// `λ₁ − λ₂` of the Hermitian part.
    pub gap: f64,
}

pub fn discriminant_report(l: &Superoperator, rho: &CMat) -> Result<DiscriminantReport> {
    let d = similarity_discriminant(l, rho)?;
    split_report(d)
}

/// Build the report from an already-assembled discriminant (or proxy).
pub fn split_report(d: CMat) -> Result<DiscriminantReport> {
    let dag = numkit::dagger(&d);
    let h_part = (&d + &dag).mapv(|z| z * 0.5);
    let a_part = (&d - &dag).mapv(|z| z * 0.5);
    let adb_norm = numkit::op_norm(&a_part);
    let (vals, vecs) = numkit::eig_hermitian(&h_part)?;
    let lambda1 = vals[0];
    let gap = if vals.len() > 1 { vals[0] - vals[1] } else { f64::INFINITY };
    let top_vector = vecs.column(0).to_owned();
    Ok(DiscriminantReport {
        d,
        h_part,
        a_part,
        adb_norm,
        lambda1,
        top_vector,
        gap,
    })
}

/// Approximate-detailed-balance norm `‖(D − D†)/2‖`.
pub fn adb_norm(l: &Superoperator, rho: &CMat) -> Result<f64> {
    let d = similarity_discriminant(l, rho)?;
    let dag = numkit::dagger(&d);
    Ok(numkit::op_norm(&(&d - &dag).mapv(|z| z * 0.5)))
}

fn proxy_from_family(family: &OftFamily, weight: &TransitionWeight, dim: usize) -> CMat {
    let dd = dim * dim;
    let eye = numkit::identity(dim);
    let mut out = CMat::zeros((dd, dd));
    for per_freq in &family.entries {
        for (widx, a_hat) in per_freq.iter().enumerate() {
            let gamma = weight.values[widx];
            let gamma_neg = family
                .grid
                .neg_index(widx)
                .map(|j| weight.values[j])
                .unwrap_or(0.0);
            let a_conj = conj_mat(a_hat);
            if gamma > 0.0 && gamma_neg > 0.0 {
                let cross = numkit::kron(a_hat, &a_conj);
                out = out + cross.mapv(|z| z * (gamma * gamma_neg).sqrt());
            }
            if gamma > 0.0 {
                let ada = numkit::dagger(a_hat).dot(a_hat);
                out = out - numkit::kron(&ada, &eye).mapv(|z| z * (gamma / 2.0));
                out = out - numkit::kron(&eye, &conj_mat(&ada)).mapv(|z| z * (gamma / 2.0));
            }
        }
    }
    out
}

/// Discriminant proxy
/// `D = Σ_{a,ω̄} √(γ(ω̄)γ(−ω̄)) Â⊗Â* − (γ(ω̄)/2)(Â†Â⊗I + I⊗Â*†Â*)`.
/// Requires an adjoint-closed jump set and a real filter, which make the
/// result Hermitian; a residual above 1e−12 is an error, below it the matrix
/// is symmetrized.
pub fn build_proxy(spec: &LindbladSpec) -> Result<CMat> {
    spec.validate()?;
    if spec.jumps.adjoint_permutation.is_none() {
        return Err(DiscriminantError::SymmetryViolation(
            "jump set lacks an adjoint involution".into(),
        ));
    }
    if !spec.filter.real_flag {
        return Err(DiscriminantError::SymmetryViolation("filter is not real".into()));
    }
    let family = oft::oft_discrete(&spec.jumps, &spec.filter, &spec.grid, &spec.context)?;
    let out = proxy_from_family(&family, &spec.weight, spec.context.dim());
    finalize_hermitian(out)
}

fn finalize_hermitian(m: CMat) -> Result<CMat> {
    let resid = numkit::hermiticity_residual(&m);
    if resid > 1e-12 {
        return Err(DiscriminantError::SymmetryViolation(format!(
            "proxy hermiticity residual {:.3e}",
            resid
        )));
    }
    Ok((&m + &numkit::dagger(&m)).mapv(|z| z * 0.5))
}

/// General self-adjoint proxy from a list of Lindblad operators closed under
/// adjoints via the involution `perm`:
/// `(1/2) Σ_j L_j⊗L_{j′}*† + L_j†⊗L_{j′}* − L_j†L_j⊗I − I⊗L_j*†L_j*`.
pub fn generic_proxy(dim: usize, ops: &[CMat], perm: &[usize]) -> Result<CMat> {
    if ops.len() != perm.len() {
        return Err(DiscriminantError::SymmetryViolation(
            "permutation length mismatch".into(),
        ));
    }
    for (j, &jp) in perm.iter().enumerate() {
        if jp >= ops.len() || perm[jp] != j {
            return Err(DiscriminantError::SymmetryViolation(
                "permutation is not an involution".into(),
            ));
        }
    }
    let dd = dim * dim;
    let eye = numkit::identity(dim);
    let mut out = CMat::zeros((dd, dd));
    for (j, l) in ops.iter().enumerate() {
        let lp = &ops[perm[j]];
        let lp_conj_dag = lp.t().to_owned();
        let lp_conj = conj_mat(lp);
        let ldl = numkit::dagger(l).dot(l);
        out = out + numkit::kron(l, &lp_conj_dag);
        out = out + numkit::kron(&numkit::dagger(l), &lp_conj);
        out = out - numkit::kron(&ldl, &eye);
        out = out - numkit::kron(&eye, &conj_mat(&ldl));
    }
    Ok(out.mapv(|z| z * 0.5))
}

#[derive(Clone, Debug)]
pub struct ProxyEpsilon {
    /// `‖D_sec − 𝒟(ρ, ℒ_sec)†‖`.
    pub epsilon: f64,
    /// `132 β μ̄ ‖Σ γ Ŝ†Ŝ‖`.
    pub bound: f64,
    pub pass: bool,
}

/// Measure how far the secular proxy is from an exact discriminant and
/// compare against the secular-approximation error bound. Valid only for
/// `β μ̄ ≤ 1`.
pub fn proxy_epsilon(spec: &LindbladSpec, mu: f64) -> Result<ProxyEpsilon> {
    spec.validate()?;
    let beta = spec.context.beta;
    if beta * mu > 1.0 {
        return Err(DiscriminantError::PreconditionBetaMu(beta * mu));
    }
    if spec.jumps.adjoint_permutation.is_none() {
        return Err(DiscriminantError::SymmetryViolation(
            "jump set lacks an adjoint involution".into(),
        ));
    }
    let family = oft::secular_truncate(&spec.jumps, &spec.filter, &spec.grid, &spec.context, mu)?;
    let d_sec = finalize_hermitian(proxy_from_family(&family, &spec.weight, spec.context.dim()))?;
    let l_sec = generator::build_secular(spec, mu)?;
    let disc = similarity_discriminant(&l_sec, &spec.context.rho)?;
    let epsilon = numkit::op_norm(&(&d_sec - &numkit::dagger(&disc)));

    let dim = spec.context.dim();
    let mut gram = CMat::zeros((dim, dim));
    for per_freq in &family.entries {
        for (widx, s_hat) in per_freq.iter().enumerate() {
            let gamma = spec.weight.values[widx];
            if gamma == 0.0 {
                continue;
            }
            gram = gram + numkit::dagger(s_hat).dot(s_hat).mapv(|z| z * gamma);
        }
    }
    let bound = 132.0 * beta * mu * numkit::op_norm(&gram);
    Ok(ProxyEpsilon {
        epsilon,
        bound,
        pass: epsilon <= bound * (1.0 + 1e-9),
    })
}

/// Normalized purification `vec(√ρ)` used as the reference top eigenvector.
pub fn purified_vec(rho: &CMat) -> Result<CVec> {
    let sqrt = numkit::matrix_power(rho, 0.5)?;
    let v = numkit::vec_mat(&sqrt);
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(v.mapv(|z| z / n))
}

/// Davies-limit proxy over exact Bohr components with `√(γ(ν)γ(−ν))`
/// cross weights; equals the similarity discriminant for nondegenerate
/// spectra.
pub fn bohr_proxy(
    jumps: &crate::model::JumpSet,
    weight: &TransitionWeight,
    ctx: &crate::model::GibbsContext,
) -> Result<CMat> {
    let dim = ctx.dim();
    let dd = dim * dim;
    let eye = numkit::identity(dim);
    let mut out = CMat::zeros((dd, dd));
    for (_, a) in &jumps.jumps {
        let bohr = oft::bohr_decompose(a, ctx);
        for (nu, comp) in bohr.nus.iter().zip(bohr.components.iter()) {
            let gamma = weight.gamma_fn(*nu);
            let gamma_neg = weight.gamma_fn(-*nu);
            let comp_conj = conj_mat(comp);
            out = out + numkit::kron(comp, &comp_conj).mapv(|z| z * (gamma * gamma_neg).sqrt());
            let ada = numkit::dagger(comp).dot(comp);
            out = out - numkit::kron(&ada, &eye).mapv(|z| z * (gamma / 2.0));
            out = out - numkit::kron(&eye, &conj_mat(&ada)).mapv(|z| z * (gamma / 2.0));
        }
    }
    Ok(out)
}
