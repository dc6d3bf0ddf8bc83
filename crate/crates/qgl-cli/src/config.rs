//! Experiment configuration: TOML schema plus instance assembly.

use ndarray as nd;
use num_complex::Complex64 as C64;
use qgl_core::generator::LindbladSpec;
use qgl_core::model::{self, FilterKind, HamiltonianSpec, JumpSet, WeightKind};
use qgl_core::numkit::{self, c, CMat};
use serde::Deserialize;
use std::collections::BTreeMap;

use crate::RunError;

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub seed: Option<u64>,
    pub instance: InstanceConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub hamiltonian: HamiltonianConfig,
    pub beta: f64,
    pub jumps: Vec<JumpConfig>,
    pub filter: FilterConfig,
    pub weight: WeightConfig,
    pub grid: GridConfig,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    /// "z_chain" (params = couplings then fields) or "random" (params = [seed]).
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    /// Pauli string over {I, X, Y, Z}, one letter per qubit.
    #[serde(default)]
    pub pauli: Option<String>,
    /// Row-major matrix of [re, im] pairs.
    #[serde(default)]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    /// "gaussian" (param = σ_t) or "uniform" (param = window length T).
    pub kind: String,
    pub param: f64,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    /// "metropolis" or "glauber".
    pub kind: String,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub omega0: Option<f64>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: String,
    pub values: Vec<f64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(format!("config parse error: {e}")))
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn sweep_values(&self, expected_param: &[&str], default: &[f64]) -> Result<Vec<f64>, RunError> {
        match &self.sweep {
            None => Ok(default.to_vec()),
            Some(s) => {
                if !expected_param.contains(&s.param.as_str()) {
                    return Err(RunError::Config(format!(
                        "sweep parameter '{}' does not apply to experiment '{}' (expected one of {:?})",
                        s.param, self.experiment, expected_param
                    )));
                }
                if s.values.is_empty() {
                    return Err(RunError::Config("sweep value list is empty".into()));
                }
                Ok(s.values.clone())
            }
        }
    }

    pub fn sweep_param(&self) -> Option<&str> {
        self.sweep.as_ref().map(|s| s.param.as_str())
    }
}

fn pauli_letter(ch: char) -> Result<CMat, RunError> {
    Ok(match ch {
        'I' => numkit::identity(2),
        'X' => numkit::pauli_x(),
        'Y' => numkit::pauli_y(),
        'Z' => numkit::pauli_z(),
        other => {
            return Err(RunError::Config(format!(
                "unknown Pauli letter '{other}' in jump string"
            )))
        }
    })
}

fn pauli_string(s: &str, n: usize) -> Result<CMat, RunError> {
    if s.len() != n {
        return Err(RunError::Config(format!(
            "jump string '{s}' must have one letter per qubit ({n})"
        )));
    }
    let mut acc = nd::array![[c(1.0, 0.0)]];
    for ch in s.chars() {
        acc = numkit::kron(&acc, &pauli_letter(ch)?);
    }
    Ok(acc)
}

/// Pair each jump with the index of its adjoint, when the set is closed.
fn adjoint_involution(ops: &[(String, CMat)]) -> Option<Vec<usize>> {
    let mut perm = vec![usize::MAX; ops.len()];
    for (j, (_, a)) in ops.iter().enumerate() {
        let adj = numkit::dagger(a);
        let hit = ops
            .iter()
            .position(|(_, b)| numkit::max_abs(&(&adj - b)) < 1e-12)?;
        perm[j] = hit;
    }
    Some(perm)
}

pub struct BuiltInstance {
    pub spec: LindbladSpec,
}

pub fn build_hamiltonian(cfg: &HamiltonianConfig) -> Result<qgl_core::numkit::DenseOperator, RunError> {
    let spec = match cfg.kind.as_str() {
        "z_chain" => {
            let bonds = cfg.n.saturating_sub(1);
            if cfg.params.len() != bonds + cfg.n {
                return Err(RunError::Config(format!(
                    "z_chain on {} qubits needs {} couplings then {} fields",
                    cfg.n, bonds, cfg.n
                )));
            }
            HamiltonianSpec::PauliZChain {
                n: cfg.n,
                couplings: cfg.params[..bonds].to_vec(),
                fields: cfg.params[bonds..].to_vec(),
            }
        }
        "random" => HamiltonianSpec::RandomHermitian {
            n: cfg.n,
            seed: cfg.params.first().copied().unwrap_or(0.0) as u64,
        },
        other => {
            return Err(RunError::Config(format!(
                "unknown hamiltonian kind '{other}'"
            )))
        }
    };
    model::build_hamiltonian(&spec).map_err(|e| RunError::Instance(e.to_string()))
}

pub fn filter_kind(cfg: &FilterConfig) -> Result<FilterKind, RunError> {
    match cfg.kind.as_str() {
        "gaussian" => Ok(FilterKind::Gaussian { sigma_t: cfg.param }),
        // The config carries the full window length T; the filter is
        // supported on [−T/2, T/2).
        "uniform" => Ok(FilterKind::Uniform {
            t_half: cfg.param / 2.0,
        }),
        other => Err(RunError::Config(format!("unknown filter kind '{other}'"))),
    }
}

pub fn weight_kind(cfg: &WeightConfig) -> Result<WeightKind, RunError> {
    match cfg.kind.as_str() {
        "metropolis" => Ok(WeightKind::Metropolis),
        "glauber" => Ok(WeightKind::Glauber),
        other => Err(RunError::Config(format!("unknown weight kind '{other}'"))),
    }
}

pub fn build_jumps(cfgs: &[JumpConfig], n: usize) -> Result<JumpSet, RunError> {
    if cfgs.is_empty() {
        return Err(RunError::Config("at least one jump is required".into()));
    }
    let scale = 1.0 / (cfgs.len() as f64).sqrt();
    let mut ops = Vec::new();
    for (idx, jc) in cfgs.iter().enumerate() {
        let (name, raw) = match (&jc.pauli, &jc.matrix) {
            (Some(p), None) => (p.clone(), pauli_string(p, n)?),
            (None, Some(rows)) => {
                let d = rows.len();
                let mut m = CMat::zeros((d, d));
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != d {
                        return Err(RunError::Config("jump matrix must be square".into()));
                    }
                    for (j, &[re, im]) in row.iter().enumerate() {
                        m[[i, j]] = C64::new(re, im);
                    }
                }
                (format!("matrix_{idx}"), m)
            }
            _ => {
                return Err(RunError::Config(
                    "each jump needs exactly one of 'pauli' or 'matrix'".into(),
                ))
            }
        };
        ops.push((name, raw.mapv(|z| z * scale)));
    }
    let perm = adjoint_involution(&ops);
    JumpSet::new(ops, perm).map_err(|e| RunError::Instance(e.to_string()))
}

/// Assemble the full generator spec. Override hooks replace one parameter
/// for sweeps while rebuilding everything downstream of it.
pub fn build_instance(
    inst: &InstanceConfig,
    beta_override: Option<f64>,
    n_override: Option<usize>,
    filter_override: Option<FilterKind>,
) -> Result<BuiltInstance, RunError> {
    let h = build_hamiltonian(&inst.hamiltonian)?;
    let beta = beta_override.unwrap_or(inst.beta);
    let ctx = model::make_context(h, beta).map_err(|e| RunError::Instance(e.to_string()))?;
    let n = n_override.unwrap_or(inst.grid.n);
    if !n.is_power_of_two() {
        return Err(RunError::Config(format!("grid size {n} must be a power of two")));
    }
    let grid = model::make_grid(n, &ctx, inst.grid.omega0)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let fkind = match filter_override {
        Some(k) => k,
        None => filter_kind(&inst.filter)?,
    };
    let filter =
        model::make_filter(fkind.clone(), &grid).map_err(|e| RunError::Instance(e.to_string()))?;
    let weight = model::make_weight(weight_kind(&inst.weight)?, beta, &grid)
        .map_err(|e| RunError::Instance(e.to_string()))?;
    let jumps = build_jumps(&inst.jumps, inst.hamiltonian.n)?;
    let spec = LindbladSpec {
        jumps,
        filter,
        weight,
        grid,
        context: ctx,
    };
    spec.validate().map_err(|e| RunError::Instance(e.to_string()))?;
    Ok(BuiltInstance { spec })
}
