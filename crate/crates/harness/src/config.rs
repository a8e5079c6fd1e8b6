//! Flat scenario configuration: `[section]` headers over `key = value`
//! lines, numeric lists comma-separated, `#` or `;` comments. Parameter
//! gates are evaluated eagerly at parse time; checks whose hypotheses fail
//! are disabled with a warning instead of erroring, so inadmissible
//! parameter exploration still runs.

use num_complex::Complex;
use strat_lab_core::{
    default_t_end, rate_constants, Error, GaussianProfile64, IntegratorConfig64, Method,
    ModeIndex, ModeProfiles64, PhysParams64, Result,
};

/// Enabled-check identifiers, declared in report (alphabetical) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    Divergence,
    EnergyIdentity,
    Envelopes,
    HyperbolicBounds,
    LiftupBaseline,
    Theorem1,
    Theorem2,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Divergence,
        CheckKind::EnergyIdentity,
        CheckKind::Envelopes,
        CheckKind::HyperbolicBounds,
        CheckKind::LiftupBaseline,
        CheckKind::Theorem1,
        CheckKind::Theorem2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Divergence => "divergence",
            CheckKind::EnergyIdentity => "energy_identity",
            CheckKind::Envelopes => "envelopes",
            CheckKind::HyperbolicBounds => "hyperbolic_bounds",
            CheckKind::LiftupBaseline => "liftup_baseline",
            CheckKind::Theorem1 => "theorem1",
            CheckKind::Theorem2 => "theorem2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// One fully resolved scenario: physics, mode grid, initial data,
/// integrator settings, and the enabled checks (sorted, deduplicated).
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub params: PhysParams64,
    pub ks: Vec<i32>,
    pub ls: Vec<i32>,
    pub cutoff: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub profiles: ModeProfiles64,
    pub projection: bool,
    pub integrator: IntegratorConfig64,
    pub checks: Vec<CheckKind>,
    pub theorem1_max_ratio: f64,
    pub theorem2_max_ratio: f64,
    pub timing: bool,
    /// Gate warnings emitted while resolving; each names the disabled check.
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct Raw {
    name: Option<String>,
    nu: Option<f64>,
    kappa: Option<f64>,
    beta: Option<f64>,
    ks: Option<Vec<i32>>,
    ls: Option<Vec<i32>>,
    cutoff: Option<f64>,
    panels: Option<usize>,
    nodes_per_panel: Option<usize>,
    u1: Option<GaussianProfile64>,
    u2: Option<GaussianProfile64>,
    u3: Option<GaussianProfile64>,
    theta: Option<GaussianProfile64>,
    projection: Option<bool>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_step: Option<f64>,
    t_end: Option<f64>,
    sample_dt: Option<f64>,
    method: Option<Method>,
    checks: Option<Vec<CheckKind>>,
    theorem1_max_ratio: Option<f64>,
    theorem2_max_ratio: Option<f64>,
    timing: Option<bool>,
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn invalid(field: &str, reason: &str) -> Error {
    Error::Validation {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("`{key}` expects a number, got `{value}`")))
}

fn parse_usize(value: &str, line: usize, key: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("`{key}` expects a count, got `{value}`")))
}

fn parse_bool(value: &str, line: usize, key: &str) -> Result<bool> {
    match value.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(parse_err(
            line,
            format!("`{key}` expects true or false, got `{other}`"),
        )),
    }
}

fn parse_i32_list(value: &str, line: usize, key: &str) -> Result<Vec<i32>> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|item| {
            item.trim().parse::<i32>().map_err(|_| {
                parse_err(line, format!("`{key}` expects integers, got `{item}`"))
            })
        })
        .collect()
}

/// Profile syntax: `re, im, center, sigma`.
fn parse_profile(value: &str, line: usize, key: &str) -> Result<GaussianProfile64> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 4 {
        return Err(parse_err(
            line,
            format!("`{key}` expects `re, im, center, sigma`, got `{value}`"),
        ));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| parse_f64(p, line, key))
        .collect::<Result<_>>()?;
    GaussianProfile64::new(Complex::new(nums[0], nums[1]), nums[2], nums[3])
        .map_err(|e| parse_err(line, format!("`{key}`: {e}")))
}

fn parse_checks(value: &str, line: usize) -> Result<Vec<CheckKind>> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for item in trimmed.split(',') {
        let name = item.trim();
        let kind = CheckKind::from_name(name).ok_or_else(|| {
            parse_err(
                line,
                format!(
                    "unknown check `{name}`; expected one of {}",
                    CheckKind::ALL.map(|c| c.name()).join(", ")
                ),
            )
        })?;
        out.push(kind);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

/// Parses and resolves one scenario. Defaults: eta grid on [-18, 18] with
/// 24 panels of 6 nodes; projection on; tolerances 1e-9/1e-12 with
/// max_step 0.25; horizon three e-foldings of the slowest listed mode with
/// 256 samples; checks = {divergence}.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut raw = Raw::default();
    let mut section: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.split_once(['#', ';']) {
            Some((before, _)) => before.trim(),
            None => raw_line.trim(),
        };
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated section header"))?
                .trim()
                .to_string();
            match name.as_str() {
                "scenario" | "params" | "modes" | "ic" | "integrator" | "checks" | "output" => {
                    section = Some(name);
                }
                other => return Err(parse_err(line, format!("unknown section `[{other}]`"))),
            }
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let section = section
            .as_deref()
            .ok_or_else(|| parse_err(line, "key outside any [section]"))?;
        match (section, key) {
            ("scenario", "name") => {
                if !valid_name(value) {
                    return Err(parse_err(
                        line,
                        "scenario name must be nonempty [A-Za-z0-9._-]",
                    ));
                }
                raw.name = Some(value.to_string());
            }
            ("params", "nu") => raw.nu = Some(parse_f64(value, line, key)?),
            ("params", "kappa") => raw.kappa = Some(parse_f64(value, line, key)?),
            ("params", "beta") => raw.beta = Some(parse_f64(value, line, key)?),
            ("modes", "k") => raw.ks = Some(parse_i32_list(value, line, key)?),
            ("modes", "l") => raw.ls = Some(parse_i32_list(value, line, key)?),
            ("modes", "eta_cutoff") => raw.cutoff = Some(parse_f64(value, line, key)?),
            ("modes", "eta_panels") => raw.panels = Some(parse_usize(value, line, key)?),
            ("modes", "eta_nodes_per_panel") => {
                raw.nodes_per_panel = Some(parse_usize(value, line, key)?)
            }
            ("ic", "u1") => raw.u1 = Some(parse_profile(value, line, key)?),
            ("ic", "u2") => raw.u2 = Some(parse_profile(value, line, key)?),
            ("ic", "u3") => raw.u3 = Some(parse_profile(value, line, key)?),
            ("ic", "theta") => raw.theta = Some(parse_profile(value, line, key)?),
            ("ic", "projection") => raw.projection = Some(parse_bool(value, line, key)?),
            ("integrator", "rel_tol") => raw.rel_tol = Some(parse_f64(value, line, key)?),
            ("integrator", "abs_tol") => raw.abs_tol = Some(parse_f64(value, line, key)?),
            ("integrator", "max_step") => raw.max_step = Some(parse_f64(value, line, key)?),
            ("integrator", "t_end") => raw.t_end = Some(parse_f64(value, line, key)?),
            ("integrator", "sample_dt") => raw.sample_dt = Some(parse_f64(value, line, key)?),
            ("integrator", "method") => {
                raw.method = Some(match value {
                    "explicit" => Method::Explicit,
                    "integrating_factor" => Method::IntegratingFactor,
                    other => {
                        return Err(parse_err(
                            line,
                            format!(
                                "`method` expects explicit or integrating_factor, got `{other}`"
                            ),
                        ))
                    }
                })
            }
            ("checks", "enable") => raw.checks = Some(parse_checks(value, line)?),
            ("checks", "theorem1_max_ratio") => {
                raw.theorem1_max_ratio = Some(parse_f64(value, line, key)?)
            }
            ("checks", "theorem2_max_ratio") => {
                raw.theorem2_max_ratio = Some(parse_f64(value, line, key)?)
            }
            ("output", "timing") => raw.timing = Some(parse_bool(value, line, key)?),
            (section, key) => {
                return Err(parse_err(
                    line,
                    format!("unknown key `{key}` in section `[{section}]`"),
                ))
            }
        }
    }
    resolve(raw)
}

fn resolve(raw: Raw) -> Result<ScenarioConfig> {
    let name = raw.name.ok_or_else(|| invalid("scenario.name", "required"))?;
    let nu = raw.nu.ok_or_else(|| invalid("params.nu", "required"))?;
    let kappa = raw.kappa.ok_or_else(|| invalid("params.kappa", "required"))?;
    let beta = raw.beta.ok_or_else(|| invalid("params.beta", "required"))?;
    let params = PhysParams64::new(nu, kappa, beta)?;
    let mut ks = raw.ks.ok_or_else(|| invalid("modes.k", "required"))?;
    let mut ls = raw.ls.ok_or_else(|| invalid("modes.l", "required"))?;
    ks.sort_unstable();
    ks.dedup();
    ls.sort_unstable();
    ls.dedup();

    let mut profiles = ModeProfiles64::zero();
    if let Some(p) = raw.u1 {
        profiles.u1 = p;
    }
    if let Some(p) = raw.u2 {
        profiles.u2 = p;
    }
    if let Some(p) = raw.u3 {
        profiles.u3 = p;
    }
    if let Some(p) = raw.theta {
        profiles.theta = p;
    }

    let t_end = match raw.t_end {
        Some(v) => v,
        None => {
            let mut horizon = 0.0f64;
            for &k in &ks {
                for &l in &ls {
                    if k == 0 && l == 0 {
                        continue;
                    }
                    horizon = horizon.max(default_t_end(&params, &ModeIndex::new(k, l, 0.0)?));
                }
            }
            if horizon > 0.0 {
                horizon
            } else {
                3.0 / params.min_diffusivity()
            }
        }
    };
    let integrator = IntegratorConfig64 {
        rel_tol: raw.rel_tol.unwrap_or(1e-9),
        abs_tol: raw.abs_tol.unwrap_or(1e-12),
        max_step: raw.max_step.unwrap_or(0.25),
        t_end,
        sample_dt: raw.sample_dt.unwrap_or(t_end / 256.0),
        method: raw.method.unwrap_or(Method::Explicit),
    };
    integrator.validate()?;

    let mut checks = raw.checks.unwrap_or_else(|| vec![CheckKind::Divergence]);
    if checks.is_empty() {
        return Err(invalid("checks.enable", "at least one check"));
    }
    let mut warnings = Vec::new();
    let mut disable = |checks: &mut Vec<CheckKind>, kind: CheckKind, why: &str| {
        if let Some(pos) = checks.iter().position(|&c| c == kind) {
            checks.remove(pos);
            warnings.push(format!("check `{}` disabled: {}", kind.name(), why));
        }
    };
    if let Err(gate) = rate_constants(&params) {
        let why = format!("dissipation gate fails ({gate})");
        disable(&mut checks, CheckKind::Envelopes, &why);
        disable(&mut checks, CheckKind::Theorem1, &why);
    }
    if params.beta <= 0.5 {
        disable(
            &mut checks,
            CheckKind::EnergyIdentity,
            "energy functional is not coercive for beta <= 1/2",
        );
    }
    if params.beta == 0.0 {
        disable(
            &mut checks,
            CheckKind::Theorem2,
            "streak suppression needs beta > 0",
        );
        disable(
            &mut checks,
            CheckKind::HyperbolicBounds,
            "kernel caps need beta > 0",
        );
    }
    if integrator.sample_dt > 1e-2 {
        disable(
            &mut checks,
            CheckKind::EnergyIdentity,
            "sample_dt > 1e-2 cannot resolve the finite-difference residual",
        );
    }
    if !ks.iter().any(|&k| k != 0) {
        let why = "no sheared (k != 0) modes listed";
        disable(&mut checks, CheckKind::Theorem1, why);
        disable(&mut checks, CheckKind::Envelopes, why);
        disable(&mut checks, CheckKind::EnergyIdentity, why);
    }
    if !ks.contains(&0) {
        let why = "no streak (k = 0) modes listed";
        disable(&mut checks, CheckKind::Theorem2, why);
        disable(&mut checks, CheckKind::LiftupBaseline, why);
        disable(&mut checks, CheckKind::HyperbolicBounds, why);
    }
    if checks.is_empty() {
        return Err(invalid(
            "checks.enable",
            "every enabled check was disabled by a parameter gate",
        ));
    }

    Ok(ScenarioConfig {
        name,
        params,
        ks,
        ls,
        cutoff: raw.cutoff.unwrap_or(18.0),
        panels: raw.panels.unwrap_or(24),
        nodes_per_panel: raw.nodes_per_panel.unwrap_or(6),
        profiles,
        projection: raw.projection.unwrap_or(true),
        integrator,
        checks,
        theorem1_max_ratio: raw.theorem1_max_ratio.unwrap_or(10.0),
        theorem2_max_ratio: raw.theorem2_max_ratio.unwrap_or(10.0),
        timing: raw.timing.unwrap_or(false),
        warnings,
    })
}
