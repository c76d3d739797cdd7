//! Run configuration and ODE problem files (TOML).

use std::path::Path;

use gaugeforge_core::embed::Mollifier;
use gaugeforge_core::gauge::{Gauge, ParamRange, Presentation};
use gaugeforge_core::index::IndexSet;
use gaugeforge_core::netlang::{parse_with, Expr, ParseOptions, SamplingSchedule};
use gaugeforge_core::ode::OdeProblem;
use gaugeforge_core::Q;
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_DIGITS: u32 = 50;
pub const PRECISION_ENV: &str = "GAUGEFORGE_PRECISION";

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schedule: Option<ScheduleConfig>,
    pub precision: Option<u32>,
    #[serde(default, rename = "gauge")]
    pub gauges: Vec<GaugeConfig>,
    pub mollifier: Option<MollifierConfig>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub eps0: String,
    pub ratio: String,
    pub count: usize,
}

/// One registered gauge; exactly one of `principal`, `family`, `parametric` is set.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub name: String,
    #[serde(default = "default_index")]
    pub index: String,
    pub principal: Option<String>,
    pub family: Option<Vec<String>>,
    pub parametric: Option<String>,
    pub range: Option<String>,
}

fn default_index() -> String {
    "Is".into()
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MollifierConfig {
    pub family: String,
}

/// `x' = rhs`, `x(t0) = x0` on `interval`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub rhs: String,
    pub t0: String,
    pub x0: String,
    pub interval: [String; 2],
}

pub fn expr(s: &str) -> Result<Expr, CliError> {
    parse_with(s, ParseOptions::extended()).map_err(|e| CliError::Parse(format!("`{s}`: {e}")))
}

pub fn rational(s: &str) -> Result<Q, CliError> {
    let t = s.trim();
    let bad = || CliError::Parse(format!("`{s}` is not a rational number"));
    if let Some((n, d)) = t.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == 0.into() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((i, f)) = t.split_once('.') {
        let digits = format!("{i}{f}");
        let n: num_bigint::BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_bigint::BigInt::from(10).pow(f.len() as u32);
        return Ok(Q::new(n, d));
    }
    let n: num_bigint::BigInt = t.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

pub fn index_set(s: &str) -> Result<IndexSet, CliError> {
    match s {
        "Is" | "I_s" | "is" => Ok(IndexSet::Is),
        "Nbar" | "nbar" | "N" => Ok(IndexSet::NBar),
        _ => Err(CliError::Usage(format!("unknown index set `{s}` (expected Is or Nbar)"))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        for g in &cfg.gauges {
            g.to_gauge()?;
        }
        if let Some(m) = &cfg.mollifier {
            Mollifier::from_spec(&m.family).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(s) = &cfg.schedule {
            s.to_schedule(DEFAULT_DIGITS)?;
        }
        Ok(cfg)
    }

    /// Flag, then config file, then environment, then the default.
    pub fn digits(&self, flag: Option<u32>) -> Result<u32, CliError> {
        if let Some(d) = flag.or(self.precision) {
            return Ok(d);
        }
        match std::env::var(PRECISION_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("{PRECISION_ENV}=`{v}` is not a digit count"))),
            Err(_) => Ok(DEFAULT_DIGITS),
        }
    }

    pub fn schedule(&self, flag: Option<&str>, precision: Option<u32>) -> Result<SamplingSchedule, CliError> {
        let digits = self.digits(precision)?;
        let sched = match (flag, &self.schedule) {
            (Some(f), _) => ScheduleConfig::from_flag(f)?.to_schedule(digits)?,
            (None, Some(s)) => s.to_schedule(digits)?,
            (None, None) => SamplingSchedule::default().with_digits(digits),
        };
        SamplingSchedule::new(sched.eps0.clone(), sched.ratio.clone(), sched.count, sched.digits).map_err(|e| CliError::Config(format!("schedule: {e}")))
    }

    /// Registered gauges first, then the built-in zoo.
    pub fn gauge(&self, name: &str) -> Result<Gauge, CliError> {
        if let Some(g) = self.gauges.iter().find(|g| g.name == name) {
            return g.to_gauge();
        }
        Gauge::zoo(name).ok_or_else(|| CliError::Usage(format!("unknown gauge `{name}`")))
    }

    pub fn mollifier(&self, flag: Option<&str>) -> Result<Mollifier, CliError> {
        let spec = flag.or(self.mollifier.as_ref().map(|m| m.family.as_str())).unwrap_or("hermite(3)");
        Mollifier::from_spec(spec).map_err(|e| CliError::Usage(e.to_string()))
    }
}

impl ScheduleConfig {
    /// `eps0,ratio,count`.
    pub fn from_flag(s: &str) -> Result<ScheduleConfig, CliError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [eps0, ratio, count] = parts[..] else {
            return Err(CliError::Usage(format!("--schedule expects eps0,ratio,count, got `{s}`")));
        };
        let count = count.parse().map_err(|_| CliError::Usage(format!("schedule count `{count}` is not an integer")))?;
        Ok(ScheduleConfig { eps0: eps0.into(), ratio: ratio.into(), count })
    }

    pub fn to_schedule(&self, digits: u32) -> Result<SamplingSchedule, CliError> {
        SamplingSchedule::new(rational(&self.eps0)?, rational(&self.ratio)?, self.count, digits).map_err(|e| CliError::Config(format!("schedule: {e}")))
    }
}

impl GaugeConfig {
    pub fn to_gauge(&self) -> Result<Gauge, CliError> {
        let index = index_set(&self.index).map_err(|e| CliError::Config(e.to_string()))?;
        let presentation = match (&self.principal, &self.family, &self.parametric) {
            (Some(b), None, None) => Presentation::Principal(expr(b)?),
            (None, Some(f), None) if !f.is_empty() => Presentation::FiniteFamily(f.iter().map(|s| expr(s)).collect::<Result<_, _>>()?),
            (None, None, Some(p)) => {
                let range = match self.range.as_deref().unwrap_or("naturals") {
                    "naturals" => ParamRange::Naturals,
                    "positive-reals" => ParamRange::PositiveReals,
                    r => return Err(CliError::Config(format!("gauge `{}`: unknown range `{r}`", self.name))),
                };
                Presentation::Parametric(expr(p)?, range)
            }
            _ => {
                return Err(CliError::Config(format!(
                    "gauge `{}` needs exactly one of principal, family (nonempty) or parametric",
                    self.name
                )))
            }
        };
        if self.range.is_some() && self.parametric.is_none() {
            return Err(CliError::Config(format!("gauge `{}`: range only applies to parametric gauges", self.name)));
        }
        Ok(Gauge::new(self.name.clone(), index, presentation))
    }
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_problem(&self) -> Result<OdeProblem, CliError> {
        let interval = (rational(&self.interval[0])?, rational(&self.interval[1])?);
        OdeProblem::new(expr(&self.rhs)?, expr(&self.t0)?, expr(&self.x0)?, interval).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_problem(p: &OdeProblem) -> ProblemFile {
        let r = gaugeforge_core::netlang::print::rational_string;
        ProblemFile {
            rhs: p.rhs.to_string(),
            t0: p.t0.to_string(),
            x0: p.x0.to_string(),
            interval: [r(&p.interval.0), r(&p.interval.1)],
        }
    }

    pub fn to_toml(&self) -> String {
        let q = |s: &str| toml::Value::String(s.into()).to_string();
        format!(
            "rhs = {}\nt0 = {}\nx0 = {}\ninterval = [{}, {}]\n",
            q(&self.rhs),
            q(&self.t0),
            q(&self.x0),
            q(&self.interval[0]),
            q(&self.interval[1])
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        assert!(matches!(RunConfig::from_toml("precison = 40"), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::from_toml("[schedule]\neps0 = \"1/10\"\nratio = \"1/10\"\ncount = 12\nextra = 1"), Err(CliError::Config(_))));
    }

    #[test]
    fn registry_and_schedule() {
        let cfg = RunConfig::from_toml(
            "precision = 40\n[schedule]\neps0 = \"1/2\"\nratio = \"0.1\"\ncount = 10\n\n[[gauge]]\nname = \"log\"\nprincipal = \"-log(eps)\"\n",
        )
        .unwrap();
        let s = cfg.schedule(None, None).unwrap();
        assert_eq!((s.count, s.digits), (10, 40));
        assert_eq!(s.ratio, rational("1/10").unwrap());
        assert_eq!(cfg.gauge("log").unwrap().name, "log");
        assert!(cfg.gauge("B_pol").is_ok());
        assert!(cfg.gauge("nope").is_err());
        let s = cfg.schedule(Some("1/10,1/10,12"), Some(30)).unwrap();
        assert_eq!((s.count, s.digits), (12, 30));
    }

    #[test]
    fn gauge_needs_one_presentation() {
        let bad = "[[gauge]]\nname = \"g\"\nprincipal = \"1/eps\"\nparametric = \"powg(eps,-m)\"\n";
        assert!(RunConfig::from_toml(bad).is_err());
    }

    #[test]
    fn problem_round_trip() {
        let f = ProblemFile { rhs: "x/eps".into(), t0: "0".into(), x0: "1".into(), interval: ["-1".into(), "2".into()] };
        let p = f.to_problem().unwrap();
        let back: ProblemFile = toml::from_str(&ProblemFile::from_problem(&p).to_toml()).unwrap();
        assert_eq!(back.to_problem().unwrap(), p);
    }
}
