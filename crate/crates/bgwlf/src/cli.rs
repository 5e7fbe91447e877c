//! Command-line front end. Every command builds one JSON document; `--format csv`
//! prints its `table` (or its scalar fields when there is no table).

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::conditioning::{condition_immortal, force_critical, frequency_spectrum, harris_sevastyanov, q_process};
use crate::error::{Error, Result};
use crate::lf::LfParams;
use crate::mechanism::Mechanism;
use crate::population::{mean, survival, transition_power, variance};
use crate::progeny::{leaves_ldp, leaves_moments, ProgenyLaw};
use crate::rw::{first_passage_pmf, resolvent, resolvent_stated, scale_value, width_cdf, width_markov_cdf};
use crate::sim::{default_seed, simulate_trees};
use crate::srw::{self, extract_nested, ExcursionPath, SrwParams};
use crate::sterile::{
    conditional_sterile_given_current, cumulated_joint, gen_n_joint, psi_coefficient_asymptotic, ratio_pgf,
    ratio_transform, rho_sterile_ratio, sterile_alpha,
};
use crate::verdict::exit_code;
use crate::verify::{run_suite, Suite};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAIL: i32 = 2;
pub const EXIT_FLAGGED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bgwlf", version, about = "Linear-fractional Galton-Watson laws and their oracles")]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct MechArgs {
    #[arg(long)]
    pub pi0: Option<f64>,
    #[arg(long)]
    pub pi: Option<f64>,
    /// Mechanism JSON, inline or a file path: `{"pi0":..,"pi":..}` or
    /// `{"kind":"binary","p":..,"q":..,"r":..}`
    #[arg(long)]
    pub mech: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Survival, moments and pmf of N_n
    Law {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        founders: u64,
        /// Largest k in the pmf table
        #[arg(long, default_value_t = 20)]
        kmax: u64,
    },
    /// Conditioned and tilted processes
    Condition {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long, value_enum)]
        transform: Transform,
        #[arg(long, default_value_t = 20)]
        kmax: u64,
    },
    /// Sterile and prolific counts
    Sterile {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long, value_enum)]
        mode: SterileMode,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        #[arg(long, default_value_t = 0.5)]
        z0: f64,
        #[arg(long, default_value_t = 1.0)]
        z1: f64,
        /// Current size conditioned on (vs-current)
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
    /// Total progeny, leaves and the leaf LDP
    Progeny {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long = "pmf-max")]
        pmf_max: Option<usize>,
        #[arg(long)]
        tail: Option<u64>,
        #[arg(long)]
        leaves: bool,
        #[arg(long)]
        ldp: bool,
    },
    /// Skip-free random walk quantities
    Rw {
        #[command(flatten)]
        mech: MechArgs,
        /// Scale function w(0..=J)
        #[arg(long)]
        scale: Option<u64>,
        /// Running-maximum law and killed-chain width law from i
        #[arg(long)]
        width: Option<u64>,
        /// First-passage law to 0 from i
        #[arg(long = "first-passage")]
        first_passage: Option<u64>,
        #[arg(long)]
        resolvent: bool,
        #[arg(long, default_value_t = 30)]
        nmax: u64,
        #[arg(long, default_value_t = 1)]
        i: i64,
        #[arg(long, default_value_t = 1)]
        j: i64,
        #[arg(long, default_value_t = 1.0)]
        u: f64,
    },
    /// Simple random walk excursions and their nested trees
    Srw {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long)]
        simulate: bool,
        /// Path file: one integer per line, first line 0
        #[arg(long)]
        extract: Option<PathBuf>,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = srw::DEFAULT_HORIZON)]
        horizon: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte-Carlo trees
    Simulate {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long, default_value_t = 10_000)]
        replicas: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 1)]
        founders: u64,
        #[arg(long, default_value_t = 1000)]
        generations: usize,
        /// Per-replica records (CSV, or JSON when the name ends in .json)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, default_value = "exact")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    Hs,
    Immortal,
    Q,
    Critical,
    Spectrum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SterileMode {
    AtN,
    Cumulated,
    VsCurrent,
    Ratio,
    Exceedance,
}

/// Parses `args` (program name first), runs, prints to stdout and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok((doc, code)) => {
            let out = render(&doc, cli.format);
            let mut stdout = io::stdout().lock();
            let _ = writeln!(stdout, "{out}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs a command and returns its document and exit code.
pub fn execute(cmd: &Command) -> Result<(Value, i32)> {
    let (body, code) = match cmd {
        Command::Law { mech, n, founders, kmax } => (law(&mech.lf()?, *n, *founders, *kmax), EXIT_OK),
        Command::Condition { mech, transform, kmax } => (condition(&mech.lf()?, *transform, *kmax)?, EXIT_OK),
        Command::Sterile { mech, mode, n, z, z0, z1, k } => {
            (sterile(&mech.lf()?, *mode, *n, *z, *z0, *z1, *k)?, EXIT_OK)
        }
        Command::Progeny { mech, pmf_max, tail, leaves, ldp } => {
            (progeny(&mech.mechanism()?, *pmf_max, *tail, *leaves, *ldp)?, EXIT_OK)
        }
        Command::Rw { mech, scale, width, first_passage, resolvent, nmax, i, j, u } => {
            let m = mech.mechanism()?;
            (rw(&m, *scale, *width, *first_passage, resolvent.then_some((*i, *j, *u)), *nmax)?, EXIT_OK)
        }
        Command::Srw { p, q, r, simulate, extract, verify, samples, horizon, seed } => {
            srw_cmd(SrwParams::new(*p, *q, *r)?, *simulate, extract.as_deref(), *verify, *samples, *horizon, seed.unwrap_or_else(default_seed))?
        }
        Command::Simulate { mech, replicas, seed, workers, founders, generations, out } => {
            let seed = seed.unwrap_or_else(default_seed);
            (simulate(&mech.mechanism()?, *replicas, seed, *workers, *founders, *generations, out.as_deref())?, EXIT_OK)
        }
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let checks = run_suite(suite, seed.unwrap_or_else(default_seed));
            let code = exit_code(&checks);
            (json!({ "command": "verify", "suite": suite, "exit_code": code, "table": checks }), code)
        }
    };
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    if let Value::Object(m) = body {
        doc.extend(m);
    }
    Ok((Value::Object(doc), code))
}

impl MechArgs {
    pub fn mechanism(&self) -> Result<Mechanism> {
        match (&self.mech, self.pi0, self.pi) {
            (Some(spec), None, None) => parse_mechanism(spec),
            (None, Some(pi0), Some(pi)) => Mechanism::lf(pi0, pi),
            _ => Err(Error::InvalidParams("give either --pi0 and --pi, or --mech".into())),
        }
    }

    pub fn lf(&self) -> Result<LfParams> {
        self.mechanism()?
            .as_lf()
            .ok_or_else(|| Error::InvalidParams("this command needs a linear-fractional mechanism".into()))
    }
}

/// Reads mechanism JSON; a document without `kind` is linear fractional.
pub fn parse_mechanism(spec: &str) -> Result<Mechanism> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| Error::InvalidParams(format!("{spec}: {e}")))?
    };
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidParams(format!("mechanism JSON: {e}")))?;
    if let Value::Object(m) = &mut v {
        m.entry("kind").or_insert_with(|| json!("lf"));
    }
    let mech: Mechanism =
        serde_json::from_value(v).map_err(|e| Error::InvalidParams(format!("mechanism JSON: {e}")))?;
    mech.validated()
}

fn law(p: &LfParams, n: u32, founders: u64, kmax: u64) -> Value {
    let s1 = survival(p, n);
    let die = 1.0 - s1.value;
    let i = founders as f64;
    let table: Vec<Value> =
        (0..=kmax).map(|k| json!({ "k": k, "pmf": transition_power(p, n, founders, k) })).collect();
    json!({
        "command": "law",
        "pi0": p.pi0,
        "pi": p.pi,
        "founders": founders,
        "n": n,
        "survival": 1.0 - die.powf(i),
        "mean": i * mean(p, n),
        "variance": i * variance(p, n),
        "regime": s1.regime,
        "extinction": p.extinction(),
        "table": table,
    })
}

fn lf_table(p: &LfParams, kmax: u64) -> Vec<Value> {
    (0..=kmax).map(|k| json!({ "k": k, "pmf": p.pmf(k as usize) })).collect()
}

fn condition(p: &LfParams, t: Transform, kmax: u64) -> Result<Value> {
    let body = match t {
        Transform::Hs => {
            let c = harris_sevastyanov(p)?;
            json!({ "pi0": c.pi0, "pi": c.pi, "mean": c.mu(), "table": lf_table(&c, kmax) })
        }
        Transform::Immortal => {
            let l = condition_immortal(p)?;
            let table: Vec<Value> =
                l.coefficients(kmax as usize).iter().enumerate().map(|(k, x)| json!({ "k": k, "pmf": x })).collect();
            json!({ "success": l.success, "mean": 1.0 / l.success, "table": table })
        }
        Transform::Q => {
            let q = q_process(p)?;
            let table: Vec<Value> = (1..=kmax).map(|i| json!({ "i": i, "invariant": q.invariant_pmf(i) })).collect();
            json!({ "rho": q.rho, "gamma": q.gamma, "mean_offspring": q.mean(), "table": table })
        }
        Transform::Critical => {
            let f = force_critical(p)?;
            json!({
                "tau": f.tau,
                "sigma2": f.sigma2,
                "pi0": f.params.pi0,
                "pi": f.params.pi,
                "table": lf_table(&f.params, kmax),
            })
        }
        Transform::Spectrum => {
            let table: Vec<Value> = (1..=kmax).map(|i| json!({ "i": i, "phi": frequency_spectrum(p, i) })).collect();
            json!({ "regime": p.class(), "table": table })
        }
    };
    Ok(with_command("condition", json!({ "transform": format!("{t:?}").to_lowercase() }), body))
}

fn with_command(cmd: &str, head: Value, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(cmd));
    for part in [head, body] {
        if let Value::Object(x) = part {
            m.extend(x);
        }
    }
    Value::Object(m)
}

fn sterile(p: &LfParams, mode: SterileMode, n: u32, z: f64, z0: f64, z1: f64, k: u64) -> Result<Value> {
    let body = match mode {
        SterileMode::AtN => json!({ "n": n, "z": z, "z0": z0, "z1": z1, "value": gen_n_joint(p, n, z, z0, z1) }),
        SterileMode::Cumulated => json!({ "n": n, "zb0": z0, "zb1": z1, "value": cumulated_joint(p, n, z0, z1)? }),
        SterileMode::VsCurrent => json!({
            "n": n,
            "k": k,
            "zb0": z0,
            "value": conditional_sterile_given_current(p, n, k, z0)?,
            "alpha": sterile_alpha(p, z0)?,
            "coefficient_asymptotic": psi_coefficient_asymptotic(p, n, k, z0)?,
        }),
        SterileMode::Ratio => json!({
            "n": n,
            "z0": z0,
            "printed_transform": ratio_pgf(p, n, z0)?,
            "ratio_transform": ratio_transform(p, n, z0, 1e-14),
        }),
        SterileMode::Exceedance => {
            let r = rho_sterile_ratio(p)?;
            json!({ "rho": r.rho, "exceeds": r.exceeds })
        }
    };
    let mode = match mode {
        SterileMode::AtN => "at-n",
        SterileMode::Cumulated => "cumulated",
        SterileMode::VsCurrent => "vs-current",
        SterileMode::Ratio => "ratio",
        SterileMode::Exceedance => "exceedance",
    };
    Ok(with_command("sterile", json!({ "mode": mode, "pi0": p.pi0, "pi": p.pi }), body))
}

fn progeny(m: &Mechanism, pmf_max: Option<usize>, tail: Option<u64>, leaves: bool, ldp: bool) -> Result<Value> {
    let law = ProgenyLaw::new(*m)?;
    let mut out = Map::new();
    out.insert("mechanism".into(), json!(m));
    out.insert("extinction".into(), json!(m.extinction()));
    out.insert("tau".into(), json!(law.tau.tau));
    out.insert("zc".into(), json!(law.tau.zc));
    let nothing = pmf_max.is_none() && tail.is_none() && !leaves && !ldp;
    if let Some(k) = pmf_max.or(nothing.then_some(20)) {
        let table: Vec<Value> = law.pmf(k).iter().enumerate().map(|(k, x)| json!({ "k": k, "pmf": x })).collect();
        out.insert("table".into(), json!(table));
    }
    if let Some(k) = tail {
        let exact = law.pmf(k as usize)[k as usize];
        out.insert(
            "tail".into(),
            json!({ "k": k, "exact": exact, "asymptotic": law.tail(k), "verified": law.tail_verified() }),
        );
    }
    if leaves {
        let (m0, s2) = leaves_moments(m)?;
        out.insert("leaves".into(), json!({ "m0": m0, "sigma0_sq": s2 }));
    }
    if ldp {
        let l = leaves_ldp(m)?;
        let rates: Vec<Value> = (1..20).map(|i| {
            let r = i as f64 / 20.0;
            json!({ "rho": r, "rate": l.rate(r) })
        })
        .collect();
        out.insert("ldp".into(), json!({ "rho_star": l.rho_star, "m0": l.m0, "rates": rates }));
    }
    Ok(with_command("progeny", json!({}), Value::Object(out)))
}

fn rw(
    m: &Mechanism,
    scale: Option<u64>,
    width: Option<u64>,
    first_passage: Option<u64>,
    res: Option<(i64, i64, f64)>,
    nmax: u64,
) -> Result<Value> {
    let mut out = Map::new();
    out.insert("mechanism".into(), json!(m));
    if let Some(jm) = scale {
        let t = (0..=jm).map(|j| Ok(json!({ "j": j, "w": scale_value(m, j)? }))).collect::<Result<Vec<_>>>()?;
        out.insert("table".into(), json!(t));
    }
    if let Some(i) = width {
        if i == 0 {
            return Err(Error::InvalidParams("--width needs i >= 1".into()));
        }
        let t = (i..=i + nmax)
            .map(|v| {
                Ok(json!({
                    "m": v,
                    "walk_max_cdf": width_cdf(m, i, v - i)?,
                    "width_cdf": width_markov_cdf(m, i, v)?,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(if scale.is_some() { "width" } else { "table" }.into(), json!(t));
    }
    if let Some(i) = first_passage {
        let t: Vec<Value> = (i..=i.max(nmax)).map(|n| json!({ "n": n, "pmf": first_passage_pmf(m, i, n) })).collect();
        let key = if out.contains_key("table") { "first_passage" } else { "table" };
        out.insert(key.into(), json!(t));
    }
    if let Some((i, j, u)) = res {
        let g = resolvent(m, u, i, j, 1_000_000)?;
        let mut r = json!({ "i": i, "j": j, "u": u, "g": g });
        if i == j {
            r["return_probability"] = json!(1.0 - 1.0 / g);
        }
        if i >= 1 && j >= 1 {
            r["printed"] = json!(resolvent_stated(m, u, i as u64, j as u64)?);
        }
        out.insert("resolvent".into(), r);
    }
    Ok(with_command("rw", json!({}), Value::Object(out)))
}

#[allow(clippy::too_many_arguments)]
fn srw_cmd(
    params: SrwParams,
    simulate: bool,
    extract: Option<&std::path::Path>,
    verify: bool,
    samples: usize,
    horizon: u64,
    seed: u64,
) -> Result<(Value, i32)> {
    let mut out = Map::new();
    out.insert("params".into(), json!(params));
    out.insert("harris_mechanism".into(), json!(srw::harris_mechanism(&params)));
    let mut code = EXIT_OK;
    if simulate {
        let path = srw::simulate_excursion_seeded(&params, seed, horizon);
        let nested = extract_nested(&path).ok();
        out.insert("seed".into(), json!(seed));
        out.insert("path".into(), json!({ "heights": path.heights, "finished": path.finished, "nested": nested }));
    }
    if let Some(f) = extract {
        let text = std::fs::read_to_string(f).map_err(|e| Error::InvalidParams(format!("{}: {e}", f.display())))?;
        let path = ExcursionPath::parse_lines(&text)?;
        out.insert("nested".into(), json!(extract_nested(&path)?));
    }
    if verify {
        let rep = srw::verify_with(&params, samples, seed, horizon, None);
        code = rep.exit_code();
        out.insert("samples".into(), json!(samples));
        out.insert("seed".into(), json!(seed));
        out.insert("unfinished".into(), json!(rep.unfinished));
        out.insert("exit_code".into(), json!(code));
        out.insert("table".into(), json!(rep.checks));
    }
    if !(simulate || verify || extract.is_some()) {
        return Err(Error::InvalidParams("srw needs --simulate, --extract or --verify".into()));
    }
    Ok((with_command("srw", json!({}), Value::Object(out)), code))
}

#[derive(Serialize)]
struct Replica {
    replica: usize,
    extinct: bool,
    exploded: bool,
    height: Option<usize>,
    width: u64,
    total: u64,
    leaves: u64,
}

fn simulate(
    m: &Mechanism,
    replicas: usize,
    seed: u64,
    workers: Option<usize>,
    founders: u64,
    generations: usize,
    out: Option<&std::path::Path>,
) -> Result<Value> {
    let trees = simulate_trees(m, founders, generations, replicas, seed, workers);
    let rows: Vec<Replica> = trees
        .iter()
        .enumerate()
        .map(|(k, t)| Replica {
            replica: k,
            extinct: t.extinct(),
            exploded: t.exploded,
            height: t.height(),
            width: t.width(),
            total: t.total(),
            leaves: t.leaves(),
        })
        .collect();
    let n = replicas.max(1) as f64;
    let ext = rows.iter().filter(|r| r.extinct).count() as f64 / n;
    let mean_total = rows.iter().filter(|r| r.extinct).map(|r| r.total as f64).sum::<f64>()
        / rows.iter().filter(|r| r.extinct).count().max(1) as f64;
    if let Some(path) = out {
        let table = serde_json::to_value(&rows).expect("serializable");
        let text = if path.extension().is_some_and(|e| e == "json") {
            to_json17(&json!({ "schema_version": SCHEMA_VERSION, "table": table }))
        } else {
            to_csv(&table)
        };
        std::fs::write(path, text).map_err(|e| Error::InvalidParams(format!("{}: {e}", path.display())))?;
    }
    Ok(json!({
        "command": "simulate",
        "mechanism": m,
        "replicas": replicas,
        "seed": seed,
        "founders": founders,
        "generations": generations,
        "extinct_fraction": ext,
        "mean_total_given_extinct": mean_total,
        "out": out.map(|p| p.display().to_string()),
    }))
}

// ---- rendering ----------------------------------------------------------

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..17).contains(&e) {
        format!("{:.*}", (16 - e) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

struct Fmt17;

impl serde_json::ser::Formatter for Fmt17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }
}

pub fn to_json17(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fmt17);
    v.serialize(&mut ser).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => fmt17(f),
            _ => n.to_string(),
        },
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => {
            let s = to_json17(other);
            format!("\"{}\"", s.replace('"', "\"\""))
        }
    }
}

/// Rows of an array of objects, or `key,value` rows of an object's scalars.
pub fn to_csv(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Array(rows) => {
            let mut keys: Vec<&String> = Vec::new();
            for r in rows {
                if let Value::Object(m) = r {
                    for k in m.keys() {
                        if !keys.contains(&k) {
                            keys.push(k);
                        }
                    }
                }
            }
            if keys.is_empty() {
                return out;
            }
            out += &keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
            out.push('\n');
            for r in rows {
                let cells: Vec<String> = keys.iter().map(|k| csv_cell(r.get(k.as_str()).unwrap_or(&Value::Null))).collect();
                out += &cells.join(",");
                out.push('\n');
            }
        }
        Value::Object(m) => {
            out += "key,value\n";
            for (k, x) in m.iter().filter(|(_, x)| !x.is_array() && !x.is_object()) {
                out += &format!("{k},{}\n", csv_cell(x));
            }
        }
        _ => {}
    }
    out.trim_end().to_string()
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => to_json17(doc),
        Format::Csv => match doc.get("table") {
            Some(t) if t.is_array() => to_csv(t),
            _ => to_csv(doc),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt17(0.5), "0.50000000000000000");
        assert_eq!(fmt17(1e-9), "1.0000000000000001e-9");
        let back: f64 = fmt17(0.1 + 0.2).parse().unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }

    #[test]
    fn mechanism_without_kind_is_lf() {
        assert_eq!(parse_mechanism(r#"{"pi0":0.4,"pi":0.6}"#).unwrap(), Mechanism::Lf { pi0: 0.4, pi: 0.6 });
        assert_eq!(
            parse_mechanism(r#"{"kind":"binary","p":0.25,"q":0.25,"r":0.5}"#).unwrap(),
            Mechanism::Binary { q: 0.25, r: 0.5, p: 0.25 }
        );
        assert!(parse_mechanism(r#"{"pi0":1.4,"pi":0.6}"#).is_err());
    }

    #[test]
    fn law_document() {
        let cmd = Command::Law { mech: MechArgs { pi0: Some(0.4), pi: Some(0.6), mech: None }, n: 3, founders: 1, kmax: 5 };
        let (doc, code) = execute(&cmd).unwrap();
        assert_eq!(code, 0);
        assert_eq!(doc["schema_version"], 1);
        assert!((doc["survival"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(render(&doc, Format::Csv).starts_with("k,pmf\n0,"));
    }
}
