#![allow(dead_code)]

use qgl_core::generator::LindbladSpec;
use qgl_core::model::{self, FilterKind, HamiltonianSpec, WeightKind};
use qgl_core::numkit;

/// Single qubit H = Z with a Pauli-X jump, Metropolis weights, and a
/// Gaussian time filter. The workhorse instance: its Davies limit is exactly
/// solvable and every circuit stays small.
pub fn single_qubit_spec(beta: f64, n: usize, sigma_t: f64) -> LindbladSpec {
    spec_with_filter(beta, n, FilterKind::Gaussian { sigma_t })
}

/// Same instance on a grid whose spacing divides the Bohr frequency ±2, as
/// the secular machinery requires.
pub fn single_qubit_spec_rounded(beta: f64, n: usize, sigma_t: f64, omega0: f64) -> LindbladSpec {
    let h = model::build_hamiltonian(&HamiltonianSpec::Explicit(numkit::pauli_z())).unwrap();
    let ctx = model::make_context(h, beta).unwrap();
    let grid = model::make_grid(n, &ctx, Some(omega0)).unwrap();
    let filter = model::make_filter(FilterKind::Gaussian { sigma_t }, &grid).unwrap();
    let weight = model::make_weight(WeightKind::Metropolis, beta, &grid).unwrap();
    let jumps = model::single_x_jump();
    LindbladSpec {
        jumps,
        filter,
        weight,
        grid,
        context: ctx,
    }
}

pub fn spec_with_filter(beta: f64, n: usize, filter: FilterKind) -> LindbladSpec {
    let h = model::build_hamiltonian(&HamiltonianSpec::Explicit(numkit::pauli_z())).unwrap();
    let ctx = model::make_context(h, beta).unwrap();
    let grid = model::make_grid(n, &ctx, None).unwrap();
    let filter = model::make_filter(filter, &grid).unwrap();
    let weight = model::make_weight(WeightKind::Metropolis, beta, &grid).unwrap();
    let jumps = model::single_x_jump();
    LindbladSpec {
        jumps,
        filter,
        weight,
        grid,
        context: ctx,
    }
}

/// Two-qubit ZZ chain with transverse fields, single-site X jumps scaled to
/// unit Gram norm.
pub fn two_qubit_spec(beta: f64, n: usize, sigma_t: f64) -> LindbladSpec {
    let h = model::build_hamiltonian(&HamiltonianSpec::PauliZChain {
        n: 2,
        couplings: vec![0.6],
        fields: vec![1.0, 0.7],
    })
    .unwrap();
    let ctx = model::make_context(h, beta).unwrap();
    let grid = model::make_grid(n, &ctx, None).unwrap();
    let filter = model::make_filter(FilterKind::Gaussian { sigma_t }, &grid).unwrap();
    let weight = model::make_weight(WeightKind::Metropolis, beta, &grid).unwrap();
    let x = numkit::pauli_x();
    let eye = numkit::identity(2);
    let scale = 1.0 / (2.0f64).sqrt();
    let x0 = numkit::kron(&x, &eye).mapv(|z| z * scale);
    let x1 = numkit::kron(&eye, &x).mapv(|z| z * scale);
    let jumps = model::JumpSet::new(
        vec![("x0".into(), x0), ("x1".into(), x1)],
        Some(vec![0, 1]),
    )
    .unwrap();
    LindbladSpec {
        jumps,
        filter,
        weight,
        grid,
        context: ctx,
    }
}

/// Depolarizing channel generator: jumps {X, Y, Z}/√3, so
/// `e^{tℒ}` contracts the Bloch ball as `e^{−4t/3}`.
pub fn depolarizer() -> qgl_core::numkit::Superoperator {
    use qgl_core::numkit::{c, Picture, Superoperator};
    let eye = numkit::identity(2);
    let third = 1.0 / 3.0;
    let mut terms = vec![];
    for p in [numkit::pauli_x(), numkit::pauli_y(), numkit::pauli_z()] {
        terms.push((c(third, 0.0), p.clone(), numkit::dagger(&p)));
        terms.push((c(-third / 2.0, 0.0), eye.clone(), eye.clone()));
        terms.push((c(-third / 2.0, 0.0), eye.clone(), eye.clone()));
    }
    Superoperator::from_terms(terms, Picture::Schrodinger).unwrap()
}

/// Gibbs populations of H = Z at inverse temperature β.
pub fn gibbs_populations(beta: f64) -> (f64, f64) {
    let z = (-beta).exp() + beta.exp();
    ((-beta).exp() / z, beta.exp() / z)
}
