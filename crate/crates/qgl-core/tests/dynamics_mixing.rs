use approx::assert_abs_diff_eq;
use qgl_core::{discriminant, dynamics, generator, numkit};

mod common;

#[test]
fn evolution_is_a_semigroup() {
    let spec = common::single_qubit_spec(1.0, 32, 4.0);
    let l = generator::build_lindbladian(&spec).unwrap();
    let mut rho0 = numkit::identity(2).mapv(|z| z * 0.5);
    rho0[[0, 1]] = numkit::c(0.3, -0.1);
    rho0[[1, 0]] = numkit::c(0.3, 0.1);
    let one_shot = dynamics::evolve(&l, &rho0, 0.9);
    let two_step = dynamics::evolve(&l, &dynamics::evolve(&l, &rho0, 0.4), 0.5);
    assert!(numkit::max_abs(&(&one_shot - &two_step)) < 1e-12);
    assert!((numkit::trace(&one_shot).re - 1.0).abs() < 1e-12);
}

#[test]
fn fixed_point_matches_long_time_evolution() {
    let spec = common::two_qubit_spec(0.7, 32, 4.0);
    let l = generator::build_davies(&spec.jumps, &spec.weight, &spec.context).unwrap();
    let fix = dynamics::fixed_point(&l).unwrap();
    let mut rho0 = numkit::CMat::zeros((4, 4));
    rho0[[0, 0]] = numkit::c(1.0, 0.0);
    let late = dynamics::evolve(&l, &rho0, 200.0);
    assert!(numkit::max_abs(&(&late - &fix)) < 1e-9);
}

#[test]
fn depolarizer_mixing_time_matches_closed_form() {
    // The uniform depolarizer contracts traceless operators as e^{−4t/3},
    // so the worst-case trace distance halves at t = (3/4) ln 2.
    let l = common::depolarizer();
    let rep = dynamics::mixing_time(&l, 5.0, 400, 7).unwrap();
    let oracle = 0.75 * (2.0f64).ln();
    assert!(
        (rep.t_mix - oracle).abs() / oracle < 0.02,
        "t_mix {} vs {oracle}",
        rep.t_mix
    );
    // The real spectral gap of the generator is 4/3.
    let gap = dynamics::generator_real_gap(&l).unwrap();
    assert_abs_diff_eq!(gap, 4.0 / 3.0, epsilon = 1e-9);
}

#[test]
fn mixing_reports_failure_when_horizon_too_short() {
    let l = common::depolarizer().scale(1e-3);
    assert!(matches!(
        dynamics::mixing_time(&l, 1.0, 100, 3),
        Err(dynamics::DynamicsError::NotMixed(_))
    ));
}

#[test]
fn mixing_lower_bounds_the_real_gap() {
    let spec = common::single_qubit_spec(1.0, 32, 4.0);
    let l = generator::build_davies(&spec.jumps, &spec.weight, &spec.context).unwrap();
    let rep = dynamics::mixing_time(&l, 30.0, 400, 11).unwrap();
    let gap = dynamics::generator_real_gap(&l).unwrap();
    assert!(
        (2.0f64).ln() / rep.t_mix <= gap * (1.0 + 1e-6),
        "ln2/t_mix {} vs gap {gap}",
        (2.0f64).ln() / rep.t_mix
    );
}

#[test]
fn gap_based_mixing_bounds_hold_for_davies() {
    let spec = common::single_qubit_spec(1.0, 32, 4.0);
    let l = generator::build_davies(&spec.jumps, &spec.weight, &spec.context).unwrap();
    let rep = discriminant::discriminant_report(&l, &spec.context.rho).unwrap();
    let rep_mix = dynamics::mixing_time(&l, 60.0, 400, 13).unwrap();
    // Detailed-balance bound: t_mix ≤ ln(2‖ρ^{−1/2}‖)/λ_gap(ℋ).
    let db = dynamics::db_mixing_bound(&spec.context.rho, rep.gap).unwrap();
    assert!(rep_mix.t_mix <= db, "t_mix {} bound {db}", rep_mix.t_mix);
    let loose = dynamics::hermitian_gap_mixing_bound(&spec.context.rho, rep.gap).unwrap();
    assert!(db <= loose + 1e-12);
}

#[test]
fn mixing_difference_bound_gates_on_the_product() {
    assert!(dynamics::mixing_time_difference_bound(2.0, 0.3).is_none());
    let b = dynamics::mixing_time_difference_bound(2.0, 0.05).unwrap();
    assert!(b >= 2.0, "perturbed bound {b} must not shrink");
    // Even a vanishing perturbation costs a second halving round, because
    // the log ratio inside the ceiling sits just above one.
    let tight = dynamics::mixing_time_difference_bound(2.0, 1e-12).unwrap();
    assert_abs_diff_eq!(tight, 4.0, epsilon = 1e-9);
}

#[test]
fn bound_suite_passes_on_the_workhorse_instance() {
    let spec = common::single_qubit_spec(1.0, 128, 8.0);
    let l = generator::build_lindbladian(&spec).unwrap();
    let other = generator::build_davies(&spec.jumps, &spec.weight, &spec.context).unwrap();
    let entries =
        dynamics::bound_suite(&l, &spec.context.rho, 60.0, 5, Some(&other)).unwrap();
    assert!(!entries.is_empty());
    for e in &entries {
        if let Some(ok) = e.pass {
            assert!(ok, "{}: lhs {:.3e} rhs {:.3e} ({})", e.name, e.lhs, e.rhs, e.note);
        }
    }
    let names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
    for expected in [
        "fixed_point_error_mix",
        "mixing_to_gap",
        "bauer_fike",
        "eigenvector_perturb",
    ] {
        assert!(names.contains(&expected), "missing entry {expected}");
    }
}

#[test]
fn phase_alignment_removes_global_phase() {
    let spec = common::single_qubit_spec(1.0, 32, 4.0);
    let v = discriminant::purified_vec(&spec.context.rho).unwrap();
    let rotated = v.mapv(|z| z * numkit::c(0.0, 1.0));
    let aligned = dynamics::phase_align(&rotated, &v);
    let dist: f64 = (&aligned - &v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(dist < 1e-12);
}
