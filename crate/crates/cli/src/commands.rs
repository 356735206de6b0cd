use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use isoperim::htype::{perimeter_h, HTypeStructure};
use isoperim::measures::{iso_ratio, perimeter_grid, perimeter_profile, volume_grid, volume_profile};
use isoperim::profileode::{shoot, ShootingConfig, ShootingReport};
use isoperim::rearrange::{dilate_grid, rearrange_full, symmetric_difference_volume, Stage};
use isoperim::spaces::dilate_profile;
use isoperim::verify::{run_suite, Check};
use isoperim::{Params, Profile, QuadrantGrid, VERSION};
use rayon::prelude::*;
use serde::Serialize;

use crate::{HtypeAction, MeasureArgs, ParamArgs, RearrangeArgs, SolveArgs, VerifyArgs};

pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

/// A checked property failed; maps to exit code 3.
#[derive(Debug)]
struct Violation(String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Violation>().is_some() {
        return EXIT_INVARIANT;
    }
    match e.downcast_ref::<isoperim::Error>() {
        Some(isoperim::Error::Numerical(_) | isoperim::Error::Bracket(_)) => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("ISO_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().with_context(|| format!("ISO_THREADS=`{v}` is not a count"))?;
    if n == 0 {
        bail!("ISO_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    command: &'a str,
    params: Option<Params>,
    tolerances: BTreeMap<&'static str, f64>,
    seed: u64,
    result: T,
}

fn emit<T: Serialize>(
    command: &str,
    params: Option<Params>,
    tolerances: BTreeMap<&'static str, f64>,
    seed: u64,
    result: T,
    out: Option<&Path>,
) -> Result<()> {
    let env = Envelope { version: VERSION, command, params, tolerances, seed, result };
    let text = serde_json::to_string_pretty(&env)? + "\n";
    if let Some(p) = out {
        write(p, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn resolve_params(a: &ParamArgs, fallback: Option<Params>) -> Result<Params> {
    let p = match (a.h, a.k, a.alpha, fallback) {
        (Some(h), Some(k), Some(alpha), _) => Params::new(h, k, alpha)?,
        (h, k, alpha, Some(f)) => Params::new(h.unwrap_or(f.h), k.unwrap_or(f.k), alpha.unwrap_or(f.alpha))?,
        _ => bail!(isoperim::Error::InvalidParams("--h, --k and --alpha are required".into())),
    };
    Ok(p)
}

fn regrid(grid: QuadrantGrid, params: Params) -> Result<QuadrantGrid> {
    if *grid.params() == params {
        return Ok(grid);
    }
    Ok(QuadrantGrid::new(params, grid.r_edges().to_vec(), grid.s_edges().to_vec(), &grid.occupied_cells())?)
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{')
}

#[derive(Serialize)]
struct SolveOutput {
    report: ShootingReport,
    profile_csv: Option<PathBuf>,
}

pub fn solve(a: SolveArgs) -> Result<()> {
    let mut tuples = Vec::new();
    for &h in &a.h {
        for &k in &a.k {
            for &alpha in &a.alpha {
                tuples.push(Params::new(h, k, alpha)?);
            }
        }
    }
    let bracket = match a.bracket.as_deref() {
        None => None,
        Some(&[lo, hi]) => Some((lo, hi)),
        Some(_) => bail!(isoperim::Error::InvalidParams("--bracket takes exactly two values LO,HI".into())),
    };
    let mut cfg = ShootingConfig { tol_c: a.tol_c, nodes: a.nodes, bracket, ..ShootingConfig::default() };
    cfg.step.rtol = a.tol_step;
    cfg.step.atol = a.tol_step * 1e-2;
    let runs: Vec<_> = tuples
        .par_iter()
        .map(|p| -> Result<(ShootingReport, Profile)> {
            let res = shoot(p, &cfg).with_context(|| format!("shooting at h={} k={} alpha={}", p.h, p.k, p.alpha))?;
            Ok((ShootingReport::from_result(&res)?, res.profile))
        })
        .collect();
    let mut tolerances = BTreeMap::from([
        ("tol_c", cfg.tol_c),
        ("tol_step", cfg.step.rtol),
        ("atol_step", cfg.step.atol),
        ("zero_tol", cfg.zero_tol),
        ("eps_start", cfg.eps_start),
    ]);
    if let Some((lo, hi)) = bracket {
        tolerances.extend([("bracket_lo", lo), ("bracket_hi", hi)]);
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut outputs = Vec::new();
    for (p, run) in tuples.iter().zip(runs) {
        let (report, profile) = run?;
        let stem = format!("solve_h{}_k{}_a{}", p.h, p.k, p.alpha);
        let csv = a.out.as_ref().map(|d| d.join(format!("{stem}.csv")));
        if let Some(path) = &csv {
            write(path, &profile.to_csv_string())?;
        }
        let out = SolveOutput { report, profile_csv: csv };
        let json = a.out.as_ref().map(|d| d.join(format!("{stem}.json")));
        outputs.push((*p, out, json));
    }
    for (p, out, json) in outputs {
        emit("solve", Some(p), tolerances.clone(), a.seed, out, json.as_deref())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Measured {
    input: &'static str,
    dilate: f64,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "I")]
    i: f64,
}

pub fn measure(a: MeasureArgs) -> Result<()> {
    let text = read(&a.input)?;
    let (params, kind, per, vol) = if is_json(&a.input, &text) {
        let grid = QuadrantGrid::from_json(&text).with_context(|| format!("parsing {}", a.input.display()))?;
        let params = resolve_params(&a.params, Some(*grid.params()))?;
        let grid = dilate_grid(&regrid(grid, params)?, a.dilate)?;
        (params, "grid", perimeter_grid(&grid)?, volume_grid(&grid))
    } else {
        let params = resolve_params(&a.params, None)?;
        let prof = Profile::read_csv(text.as_bytes()).with_context(|| format!("parsing {}", a.input.display()))?;
        let prof = if a.dilate == 1.0 { prof } else { dilate_profile(&params, &prof, a.dilate)? };
        (params, "profile", perimeter_profile(&params, &prof)?, volume_profile(&params, &prof)?)
    };
    let m = Measured { input: kind, dilate: a.dilate, p: per, v: vol, i: iso_ratio(&params, per, vol)? };
    emit("measure", Some(params), BTreeMap::new(), a.seed, m, a.out.as_deref())
}

#[derive(Serialize)]
struct RearrangeOutput {
    trace: Vec<Stage>,
    lambda: f64,
    eps_grid: f64,
    /// `|R(E) - E| / |E|`; zero for a set that is already symmetric.
    relative_change: f64,
    grid: Option<PathBuf>,
}

pub fn rearrange(a: RearrangeArgs) -> Result<()> {
    let text = read(&a.input)?;
    let grid = QuadrantGrid::from_json(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let params = resolve_params(&a.params, Some(*grid.params()))?;
    let grid = regrid(grid, params)?;
    let r = rearrange_full(&params, &grid)?;
    if let Some(p) = &a.out {
        write(p, &(r.grid.to_json()? + "\n"))?;
    }
    let out = RearrangeOutput {
        relative_change: symmetric_difference_volume(&grid, &r.grid) / volume_grid(&grid),
        trace: r.trace,
        lambda: r.lambda,
        eps_grid: r.eps_grid,
        grid: a.out.clone(),
    };
    emit("rearrange", Some(params), BTreeMap::new(), a.seed, out, None)
}

#[derive(Serialize)]
struct HPerimeter {
    #[serde(rename = "P_H")]
    p_h: f64,
    vertical_weight: f64,
    #[serde(rename = "P_alpha1")]
    p_alpha: f64,
}

pub fn htype(action: HtypeAction) -> Result<()> {
    match action {
        HtypeAction::Validate { structure, tol, out, seed } => {
            let s = HTypeStructure::from_json(&read(&structure)?)
                .with_context(|| format!("parsing {}", structure.display()))?;
            let cert = s.validate(tol);
            let tolerances = BTreeMap::from([("htype", tol)]);
            emit("htype validate", None, tolerances, seed, cert, out.as_deref())?;
            if !cert.valid {
                bail!(Violation(format!(
                    "not H-type: violation {:e} at basis pair {:?}",
                    cert.max_violation, cert.worst_pair
                )));
            }
            Ok(())
        }
        HtypeAction::Perimeter { structure, profile, out, seed } => {
            let s = HTypeStructure::from_json(&read(&structure)?)
                .with_context(|| format!("parsing {}", structure.display()))?;
            let prof = Profile::read_csv(read(&profile)?.as_bytes())
                .with_context(|| format!("parsing {}", profile.display()))?;
            let params = Params::new(s.h() as u32, s.k() as u32, 1.0)?;
            let res = HPerimeter {
                p_h: perimeter_h(&s, &prof)?,
                vertical_weight: s.vertical_weight()?,
                p_alpha: perimeter_profile(&params, &prof)?,
            };
            let tolerances = BTreeMap::from([("htype", isoperim::htype::DEFAULT_HTYPE_TOL)]);
            emit("htype perimeter", Some(params), tolerances, seed, res, out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    suite: String,
    passed: bool,
    failures: usize,
    checks: Vec<Check>,
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let checks = run_suite(&a.suite, a.seed)?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| format!("{}::{}", c.suite, c.name)).collect();
    for c in &checks {
        eprintln!("{} {}::{} ({:e} vs {:e})", if c.passed { "pass" } else { "FAIL" }, c.suite, c.name, c.value, c.tolerance);
    }
    let out = VerifyOutput { suite: a.suite, passed: failed.is_empty(), failures: failed.len(), checks };
    emit("verify", None, BTreeMap::new(), a.seed, out, a.out.as_deref())?;
    if !failed.is_empty() {
        bail!(Violation(format!("violated invariants: {}", failed.join(", "))));
    }
    Ok(())
}
