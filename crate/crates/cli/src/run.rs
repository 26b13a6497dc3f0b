//! Executes one experiment config and renders its report.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num::rational::BigRational;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use islab_core::aixi::{aixi_policy, universality_csv, universality_experiment, WeightedFamily};
use islab_core::complexity::Cache;
use islab_core::cybernetic::{
    self, agent_set, env_set_b, env_set_d, optimal_policy, optimal_value, value, Environment,
    EnvironmentFile, Policy, PolicyFile, SetVariant, TableEnvironment,
};
use islab_core::measures::exchange_report;
use islab_core::players::{nash_players, rps_fixture, NormalFormGame};
use islab_core::quantity::{fmt_ratio, parse_ratio};
use islab_core::theorems::{
    check_approximation, check_covering, check_info_bound, check_simplification, PlayerFamily,
    TheoremReport,
};
use islab_core::{
    algorithmic_mass, decode_pair, BitString, Budget, ComplexityModel, Context, ExactBounded,
    LevinBounded, Lz78Estimator, Player, Quantity, MACHINE_VERSION,
};

use crate::config::*;
use crate::error::{CliError, CliResult};

/// Where exact and Levin searches persist their results.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub cache_dir: Option<PathBuf>,
}

/// The rendered outputs of one run, before anything is written.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub report: String,
    pub csv: Option<String>,
    /// `false` when a theorem witness failed its independent re-check.
    pub verified: bool,
    pub output: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
}

enum Model {
    Exact(ExactBounded),
    Levin(LevinBounded),
    Lz(Lz78Estimator),
}

impl Model {
    fn build(spec: &ModelSpec, options: &RunOptions) -> CliResult<Self> {
        let defaults = Budget::default();
        let budget = || {
            Budget::new(
                spec.max_program_bits.unwrap_or(defaults.max_program_bits()),
                spec.max_steps.unwrap_or(defaults.max_steps()),
            )
        };
        let cache = || -> CliResult<Arc<Cache>> {
            Ok(Arc::new(match &options.cache_dir {
                Some(dir) => Cache::open(dir)?,
                None => Cache::in_memory(),
            }))
        };
        Ok(match spec.name {
            ModelName::Exact => Model::Exact(ExactBounded::with_cache(budget()?, cache()?)),
            ModelName::Levin => Model::Levin(LevinBounded::with_cache(budget()?, cache()?)),
            ModelName::Lz78 => {
                if spec.max_program_bits.is_some() || spec.max_steps.is_some() {
                    return Err(CliError::Schema("the lz78 model takes no budget".into()));
                }
                Model::Lz(Lz78Estimator)
            }
        })
    }

    fn as_dyn(&self) -> &dyn ComplexityModel {
        match self {
            Model::Exact(m) => m,
            Model::Levin(m) => m,
            Model::Lz(m) => m,
        }
    }

    fn budget(&self) -> Option<Budget> {
        match self {
            Model::Exact(m) => Some(m.budget),
            Model::Levin(m) => Some(m.budget),
            Model::Lz(_) => None,
        }
    }

    fn describe(&self) -> Value {
        match self.budget() {
            Some(b) => json!({
                "name": self.as_dyn().name(),
                "max_program_bits": b.max_program_bits(),
                "max_steps": b.max_steps(),
            }),
            None => json!({ "name": self.as_dyn().name() }),
        }
    }
}

struct Ctx<'a> {
    base: &'a Path,
}

impl Ctx<'_> {
    fn read(&self, path: &Path) -> CliResult<String> {
        let full = resolve(self.base, path);
        fs::read_to_string(&full)
            .map_err(|e| CliError::MissingInput(format!("{}: {e}", full.display())))
    }

    fn player(&self, r: &PlayerRef) -> CliResult<Player> {
        Ok(match r {
            PlayerRef::Inline(p) => {
                let members: Vec<&str> = p.members.iter().map(String::as_str).collect();
                Player::from_strs(p.n, &members)?
            }
            PlayerRef::File(f) => Player::from_text(&self.read(&f.file)?)?,
            PlayerRef::Fixture(f) => {
                let (_, a, b) = rps_fixture();
                match f.fixture.as_str() {
                    "rps_a" => a,
                    "rps_b" => b,
                    other => return Err(CliError::Schema(format!("unknown fixture {other:?}"))),
                }
            }
        })
    }

    fn family(&self, spec: &FamilySpec) -> CliResult<PlayerFamily> {
        let mut members = Vec::new();
        let mut parts = Vec::new();
        if let Some(s) = &spec.all_subsets {
            members.extend(PlayerFamily::all_subsets(s.n, s.size)?.members().iter().cloned());
            parts.push(format!("subsets(n={},size={})", s.n, s.size));
        }
        if let Some(s) = &spec.singletons {
            members.extend(PlayerFamily::singletons(s.n)?.members().iter().cloned());
            parts.push(format!("singletons(n={})", s.n));
        }
        for p in &spec.members {
            members.push(self.player(p)?);
        }
        if !spec.members.is_empty() {
            parts.push(format!("listed({})", spec.members.len()));
        }
        let name = spec.name.clone().unwrap_or_else(|| parts.join("+"));
        Ok(PlayerFamily::new(name, members)?)
    }

    fn environment(&self, r: &EnvRef) -> CliResult<TableEnvironment> {
        Ok(match r {
            EnvRef::Builtin(b) => cybernetic::builtin(&b.builtin)
                .ok_or_else(|| CliError::Schema(format!("unknown environment {:?}", b.builtin)))?,
            EnvRef::File(f) => {
                let file: EnvironmentFile = serde_json::from_str(&self.read(&f.file)?)?;
                file.to_environment()?
            }
            EnvRef::Inline(file) => file.to_environment()?,
        })
    }

    fn policy(&self, r: &PolicyRef, env: &TableEnvironment, horizon: usize) -> CliResult<Policy> {
        Ok(match r {
            PolicyRef::Named(PolicyChoice::Optimal) => optimal_policy(env, horizon)?,
            PolicyRef::Table(file) => file.to_policy(env.signature())?,
            PolicyRef::File(f) => {
                let file: PolicyFile = serde_json::from_str(&self.read(&f.file)?)?;
                file.to_policy(env.signature())?
            }
        })
    }
}


fn bits(s: &str) -> CliResult<BitString> {
    Ok(s.parse()?)
}

fn ratio(s: &str) -> CliResult<BigRational> {
    Ok(parse_ratio(s)?)
}

fn quantity(s: &str) -> CliResult<Quantity> {
    Ok(s.parse()?)
}

fn input<T: DeserializeOwned>(v: &Value) -> CliResult<T> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Schema(format!("input: {e}")))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Parses and executes a config given as text. `base` resolves relative
/// file references.
pub fn execute(text: &str, base: &Path, options: &RunOptions) -> CliResult<RunOutput> {
    let config: ExperimentConfig = serde_json::from_str(text)?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let model = Model::build(&config.model, options)?;
    let ctx = Ctx { base };
    let mut csv = None;
    let mut verified = true;

    let result = match config.kind {
        Kind::Complexity => complexity(&model, input(&config.input)?)?,
        Kind::Measures => {
            let i: MeasuresInput = input(&config.input)?;
            let (a, b) = (ctx.player(&i.a)?, ctx.player(&i.b)?);
            to_value(&exchange_report(&a, &b, &bits(&i.x)?, model.as_dyn())?)
        }
        Kind::Game => game(input(&config.input)?)?,
        Kind::Cybernetic => cybernetic_run(&ctx, input(&config.input)?)?,
        Kind::Theorem1 | Kind::Theorem2 | Kind::Theorem3 | Kind::Theorem4 => {
            let m = model.as_dyn();
            let rep = match config.kind {
                Kind::Theorem1 => {
                    let i: CoveringInput = input(&config.input)?;
                    let r = i.r.as_deref().map(quantity).transpose()?;
                    check_covering(&ctx.family(&i.family)?, &bits(&i.x)?, r, m)?
                }
                Kind::Theorem2 => {
                    let i: ApproximationInput = input(&config.input)?;
                    let (a, b) = (ctx.player(&i.a)?, ctx.player(&i.b)?);
                    check_approximation(&ctx.family(&i.family)?, &a, &b, &bits(&i.x)?, m)?
                }
                Kind::Theorem3 => {
                    let i: InfoBoundInput = input(&config.input)?;
                    let (a, b) = (ctx.player(&i.a)?, ctx.player(&i.b)?);
                    check_info_bound(&ctx.family(&i.family)?, &a, &b, m)?
                }
                _ => {
                    let i: SimplificationInput = input(&config.input)?;
                    let r = i.r.as_deref().map(quantity).transpose()?;
                    check_simplification(&ctx.family(&i.family)?, &ctx.player(&i.a)?, i.c, r, m)?
                }
            };
            verified = !rep.claim || rep.verified;
            csv = Some(theorem_csv(&rep));
            to_value(&rep)
        }
        Kind::Aixi => {
            let (value, table) = aixi_run(&ctx, input(&config.input)?)?;
            csv = Some(table);
            value
        }
    };

    let report = json!({
        "machine_version": MACHINE_VERSION,
        "kind": config.kind,
        "model": model.describe(),
        "config_digest": digest,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    Ok(RunOutput {
        report: text,
        csv,
        verified,
        output: config.output.map(|p| resolve(base, &p)),
        csv_path: config.csv.map(|p| resolve(base, &p)),
    })
}

/// Reads `path`, executes it, and writes the report (stdout when the config
/// names no output file). Verification failures are reported after the
/// outputs are written.
pub fn run_experiment(path: &Path, options: &RunOptions) -> CliResult<RunOutput> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let out = execute(&text, base, options)?;
    match &out.output {
        Some(p) => fs::write(p, &out.report)
            .map_err(|e| CliError::Other(format!("{}: {e}", p.display())))?,
        None => print!("{}", out.report),
    }
    if let (Some(p), Some(csv)) = (&out.csv_path, &out.csv) {
        fs::write(p, csv).map_err(|e| CliError::Other(format!("{}: {e}", p.display())))?;
    }
    if !out.verified {
        return Err(CliError::Verification("theorem witness failed its re-check".into()));
    }
    Ok(out)
}

fn complexity(model: &Model, i: ComplexityInput) -> CliResult<Value> {
    let context = Context::new(i.context.iter().map(|s| bits(s)).collect::<CliResult<Vec<_>>>()?);
    let mut rows = Vec::new();
    for t in &i.targets {
        let x = bits(t)?;
        let mut row = match model {
            Model::Exact(m) => search_row(m.search(&x, &context)),
            Model::Levin(m) => search_row(m.search(&x, &context)),
            Model::Lz(m) => json!({ "value": to_value(&m.complexity(&x, &context)) }),
        };
        row["target"] = json!(t);
        if i.mass {
            let budget = model
                .budget()
                .ok_or_else(|| CliError::Schema("mass needs an exact or levin model".into()))?;
            if !context.is_empty() {
                return Err(CliError::Schema("mass is unconditional; drop the context".into()));
            }
            row["mass"] = json!(fmt_ratio(&algorithmic_mass(&x, &budget)));
        }
        rows.push(row);
    }
    Ok(json!({ "context": i.context, "rows": rows }))
}

fn search_row(r: islab_core::ComplexityResult) -> Value {
    json!({
        "value": to_value(&r.value),
        "exact": r.exact,
        "witness": r.witness.map(|p| p.bits().to_string()),
    })
}

fn game(i: GameInput) -> CliResult<Value> {
    Ok(match i {
        GameInput::Rps {} => {
            let (codec, a, b) = rps_fixture();
            let ab = a.intersect(&b)?;
            let rendered: Vec<String> = ab
                .members()
                .iter()
                .filter_map(|x| codec.decode(x))
                .map(|g| codec.render(&g))
                .collect();
            json!({
                "n": codec.n(),
                "size_a": a.len(),
                "size_b": b.len(),
                "intersection": ab.members(),
                "games": rendered,
            })
        }
        GameInput::Normal { n, p, q } => {
            let table = |rows: &[Vec<String>]| -> CliResult<NormalFormGame> {
                let parsed = rows
                    .iter()
                    .map(|r| r.iter().map(|s| ratio(s)).collect::<CliResult<Vec<_>>>())
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(NormalFormGame::new(n, parsed)?)
            };
            let (a, b) = nash_players(&table(&p)?, &table(&q)?)?;
            let eq = a.intersect(&b)?;
            let pairs: Vec<Value> = eq
                .members()
                .iter()
                .map(|z| {
                    let (x, y) = decode_pair(z).expect("pair encoding");
                    json!({ "x": x, "y": y, "code": z })
                })
                .collect();
            json!({
                "n": a.n(),
                "size_a": a.len(),
                "size_b": b.len(),
                "equilibria": pairs,
            })
        }
    })
}

fn cybernetic_run(ctx: &Ctx, i: CyberneticInput) -> CliResult<Value> {
    let env = ctx.environment(&i.environment)?;
    let policy = ctx.policy(&i.policy, &env, i.horizon)?;
    let tau = ratio(&i.tau)?;
    let m = i.horizon;
    let a = agent_set(&policy, m)?;
    let (variant, other) = match i.variant.as_str() {
        "B" => (SetVariant::B, env_set_b(&env, m, &tau)?),
        "D" => (SetVariant::D, env_set_d(&env, m, &tau)?),
        v => return Err(CliError::Schema(format!("variant must be B or D, got {v:?}"))),
    };
    let common = a.intersect(&other)?;
    Ok(json!({
        "environment": env.name(),
        "horizon": m,
        "tau": fmt_ratio(&tau),
        "variant": variant,
        "value": fmt_ratio(&value(&policy, &env, m)?),
        "optimal_value": fmt_ratio(&optimal_value(&env, m, &[])?),
        "policy": PolicyFile::from_policy(&policy.truncate(m)?),
        "agent_set_size": a.len(),
        "environment_set": other.members(),
        "interacts": !common.is_empty(),
        "witness": common.first(),
    }))
}

fn aixi_run(ctx: &Ctx, i: AixiInput) -> CliResult<(Value, String)> {
    let envs = i
        .environments
        .iter()
        .map(|e| ctx.environment(e))
        .collect::<CliResult<Vec<_>>>()?;
    let weights = i
        .weights
        .as_ref()
        .map(|w| w.iter().map(|s| ratio(s)).collect::<CliResult<Vec<_>>>())
        .transpose()?;
    let family = WeightedFamily::new(envs, weights)?;
    let taus = i.taus.iter().map(|s| ratio(s)).collect::<CliResult<Vec<_>>>()?;
    let [lo, hi] = i.horizons;
    if lo == 0 || lo > hi {
        return Err(CliError::Schema(format!("bad horizon range [{lo}, {hi}]")));
    }
    let rows = universality_experiment(&family, &taus, lo..=hi)?;
    let xi = family.mixture();
    let mut horizons = Vec::new();
    for m in lo..=hi {
        let p = aixi_policy(&family, m)?;
        let members: Vec<Value> = family
            .members()
            .iter()
            .map(|env| -> CliResult<Value> {
                let v_star = optimal_value(env, m, &[])?;
                let v = value(&p, env, m)?;
                Ok(json!({
                    "env": env.name(),
                    "optimal": fmt_ratio(&v_star),
                    "agent": fmt_ratio(&v),
                    "gap": fmt_ratio(&(v_star - v)),
                }))
            })
            .collect::<CliResult<_>>()?;
        horizons.push(json!({
            "m": m,
            "mixture_value": fmt_ratio(&value(&p, &xi, m)?),
            "first_action": p.act(&[]),
            "members": members,
        }));
    }
    let weights: Vec<String> = family.weights().iter().map(fmt_ratio).collect();
    let names: Vec<&str> = family.members().iter().map(|e| e.name()).collect();
    let value = json!({
        "environments": names,
        "weights": weights,
        "horizons": horizons,
        "universality": to_value(&rows),
    });
    Ok((value, universality_csv(&rows)))
}

/// Header plus one row: `theorem,family,model,claim,count,k,target,witness_complexity,slack,verified`.
pub fn theorem_csv(rep: &TheoremReport) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    format!(
        "theorem,family,model,claim,count,k,target,witness_complexity,slack,verified\n\
         {},{},{},{},{},{},{},{},{},{}\n",
        rep.theorem,
        csv_field(&rep.family),
        csv_field(&rep.model),
        rep.claim,
        opt(rep.count.map(|c| c.to_string())),
        opt(rep.k.map(|k| k.to_string())),
        rep.target,
        opt(rep.witness.as_ref().map(|w| w.complexity.to_string())),
        rep.slack,
        rep.verified,
    )
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
