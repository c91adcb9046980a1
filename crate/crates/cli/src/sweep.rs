//! Batch experiments: the cross product of instances, strategies, and
//! exponents from a spec file, one CSV row per cell. Failing cells are
//! marked in the status column and the run continues.

use std::time::Instant;

use serde::Deserialize;

use rangecast::analysis::instance_digest;
use rangecast::bounds::{
    gen_1d_nn_lb, gen_1d_universal, gen_2d_nn_lb, gen_random, gen_recursive_squares, Family,
};
use rangecast::oracle::solve_optimal;
use rangecast::{simulate, Alpha, ArrivalInstance, Error, Space, StrategyConfig, StrategyKind};

fn default_oracle() -> bool {
    true
}

/// A batch experiment description, read from JSON.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub instances: Vec<InstanceSource>,
    pub strategies: Vec<StrategySpec>,
    pub alphas: Vec<f64>,
    #[serde(default = "default_oracle")]
    pub oracle: bool,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSource {
    File {
        path: String,
    },
    Generator {
        name: String,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        x: Option<f64>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        branch: Option<String>,
        #[serde(default)]
        rounds: Option<usize>,
    },
    Random {
        space: String,
        n: usize,
        count: usize,
        seed: u64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySpec {
    pub strategy: String,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

impl StrategySpec {
    fn kind(&self) -> Result<StrategyKind, Error> {
        match self.strategy.as_str() {
            "nn" => Ok(StrategyKind::NearestNeighbor),
            "ci" => Ok(StrategyKind::CheapestIncrease),
            "knn" => Ok(StrategyKind::KNearestNeighbor {
                factor: self.k.unwrap_or(2.0),
            }),
            "dual" => Ok(StrategyKind::DualOnline {
                gamma: self.gamma.unwrap_or(4.0),
            }),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy `{other}` (expected nn|ci|knn|dual)"
            ))),
        }
    }
}

fn parse_space(name: &str) -> Result<Space, Error> {
    match name {
        "line" => Ok(Space::Line),
        "plane" => Ok(Space::Plane),
        "metric" => Ok(Space::Metric),
        other => Err(Error::InvalidParameter(format!(
            "unknown space `{other}` (expected line|plane|metric)"
        ))),
    }
}

/// Resolve a source into labeled instances. Labels avoid commas so the CSV
/// stays quote-free.
fn instantiate(source: &InstanceSource) -> anyhow::Result<Vec<(String, ArrivalInstance)>> {
    match source {
        InstanceSource::File { path } => {
            let text = std::fs::read_to_string(path)?;
            Ok(vec![(
                sanitize(path),
                ArrivalInstance::from_json_str(&text)?,
            )])
        }
        InstanceSource::Generator {
            name,
            delta,
            x,
            epsilon,
            alpha,
            branch,
            rounds,
        } => {
            let inst = match name.as_str() {
                "nn-lb-1d" => gen_1d_nn_lb(delta.unwrap_or(0.01), x.unwrap_or(1.0))?,
                "nn-lb-2d" => gen_2d_nn_lb(epsilon.unwrap_or(1e-3))?,
                "universal-1d" => {
                    let family = match branch.as_deref().unwrap_or("f2") {
                        "f1" => Family::F1,
                        "f2" => Family::F2,
                        other => {
                            return Err(Error::InvalidParameter(format!(
                                "unknown branch `{other}` (expected f1|f2)"
                            ))
                            .into())
                        }
                    };
                    gen_1d_universal(
                        Alpha::new(alpha.unwrap_or(2.0))?,
                        x.unwrap_or(1.0),
                        family,
                    )?
                }
                "recursive-squares" => gen_recursive_squares(rounds.unwrap_or(3))?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown generator `{other}`"
                    ))
                    .into())
                }
            };
            Ok(vec![(name.clone(), inst)])
        }
        InstanceSource::Random {
            space,
            n,
            count,
            seed,
        } => {
            let sp = parse_space(space)?;
            let mut out = Vec::with_capacity(*count);
            for idx in 0..*count {
                let s = seed.wrapping_add(idx as u64);
                out.push((
                    format!("random {space} n={n} seed={s}"),
                    gen_random(sp, *n, s)?,
                ));
            }
            Ok(out)
        }
    }
}

fn space_name(space: Space) -> &'static str {
    match space {
        Space::Line => "line",
        Space::Plane => "plane",
        Space::Metric => "metric",
    }
}

fn sanitize(msg: &str) -> String {
    msg.replace(',', ";").replace('\n', " ")
}

/// Run the experiment and return the CSV text. All columns except
/// `wall_ms` are deterministic for a fixed spec.
pub fn run_sweep(spec: &ExperimentSpec) -> anyhow::Result<String> {
    if spec.strategies.is_empty() {
        return Err(Error::InvalidParameter("strategy list is empty".into()).into());
    }
    if spec.alphas.is_empty() {
        return Err(Error::InvalidParameter("alpha list is empty".into()).into());
    }

    let mut instances = Vec::new();
    for source in &spec.instances {
        instances.extend(instantiate(source)?);
    }

    let mut csv =
        String::from("instance,digest,n,space,strategy,alpha,cost,oracle_cost,ratio,status,wall_ms\n");
    for (label, inst) in &instances {
        for strategy in &spec.strategies {
            let kind = strategy.kind()?;
            for &raw_alpha in &spec.alphas {
                let alpha = Alpha::new(raw_alpha)?;
                let config = StrategyConfig::new(kind, alpha)?;
                let start = Instant::now();
                let sim = simulate(inst, &config);
                let cost = sim.total_cost();
                let mut status = "ok".to_string();
                if let Err(e) = sim.trace.validate(inst, alpha) {
                    status = sanitize(&e.to_string());
                }
                let (oracle_cost, ratio) = if spec.oracle {
                    match solve_optimal(inst, alpha) {
                        Ok(res) => (
                            res.cost.to_string(),
                            if res.cost > 0.0 {
                                (cost / res.cost).to_string()
                            } else {
                                "1".to_string()
                            },
                        ),
                        Err(e) => {
                            if status == "ok" {
                                status = sanitize(&e.to_string());
                            }
                            (String::new(), String::new())
                        }
                    }
                } else {
                    (String::new(), String::new())
                };
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                csv.push_str(&format!(
                    "{label},{digest},{n},{space},{strategy},{alpha},{cost},{oracle_cost},{ratio},{status},{wall_ms:.3}\n",
                    digest = instance_digest(inst),
                    n = inst.len(),
                    space = space_name(inst.space()),
                    strategy = kind.label(),
                    alpha = raw_alpha,
                ));
            }
        }
    }
    Ok(csv)
}
