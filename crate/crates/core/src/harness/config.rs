//! Experiment configuration, read from TOML.
//!
//! ```toml
//! spot = 100.0
//! strike = 100.0
//! rate = 0.1
//! dividend = 0.0
//! volatility = 0.3
//! maturity = 0.5
//! payoff = "call"              # call | put
//! direction = "knock_out"      # knock_out | knock_in
//! monitoring = "continuous"    # continuous | discrete
//! methods = ["mc", "smc"]
//! steps = [1, 2, 4, 8, 16, 32, 64, 128]
//! particles = 100000
//! reps = 50
//! seed = 20240101
//! drift_shift = 0.0            # proposal drift shift for smc-is-density
//!
//! [[window]]
//! start = 0.0
//! end = 0.5
//! lower = 90.0                 # omit for no lower barrier
//! upper = 110.0                # omit for no upper barrier
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::Method;
use crate::error::{Error, Result};
use crate::model::{Direction, Interval, MarketTermStructure, Monitoring, OptionSpec, PayoffKind};

const TIME_TOL: f64 = 1e-12;

/// Constant barrier levels over `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierWindow {
    pub start: f64,
    pub end: f64,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
}

impl BarrierWindow {
    pub fn lower_level(&self) -> f64 {
        self.lower.unwrap_or(0.0)
    }

    pub fn upper_level(&self) -> f64 {
        self.upper.unwrap_or(f64::INFINITY)
    }
}

fn default_direction() -> Direction {
    Direction::KnockOut
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    #[serde(default)]
    pub dividend: f64,
    pub volatility: f64,
    pub maturity: f64,
    pub payoff: PayoffKind,
    #[serde(default = "default_direction")]
    pub direction: Direction,
    pub monitoring: Monitoring,
    pub methods: Vec<Method>,
    pub steps: Vec<usize>,
    pub particles: usize,
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub drift_shift: f64,
    #[serde(default, rename = "window")]
    pub windows: Vec<BarrierWindow>,
}

impl ExperimentConfig {
    /// Reads and validates a TOML file.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Parses and validates TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = toml_error_field(text, &e);
            Error::config(field, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Checks every invariant, reporting the first offending field.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(name, format!("must be a finite number > 0, got {v}")))
            }
        };
        positive("spot", self.spot)?;
        positive("strike", self.strike)?;
        positive("volatility", self.volatility)?;
        positive("maturity", self.maturity)?;
        if !self.rate.is_finite() {
            return Err(Error::config("rate", "must be finite"));
        }
        if !self.dividend.is_finite() {
            return Err(Error::config("dividend", "must be finite"));
        }
        if !self.drift_shift.is_finite() {
            return Err(Error::config("drift_shift", "must be finite"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "at least one method is required"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::config("methods", format!("`{m}` is listed twice")));
            }
        }
        if self.steps.is_empty() {
            return Err(Error::config("steps", "at least one step count is required"));
        }
        if let Some(n) = self.steps.iter().find(|n| **n == 0) {
            return Err(Error::config("steps", format!("step counts must be >= 1, got {n}")));
        }
        if self.particles < 2 {
            return Err(Error::config("particles", format!("must be >= 2, got {}", self.particles)));
        }
        if self.reps < 2 {
            return Err(Error::config("reps", format!("must be >= 2 to estimate a standard error, got {}", self.reps)));
        }
        self.validate_windows()?;
        for &n in &self.steps {
            self.term_structure(n)?;
        }
        Ok(())
    }

    fn validate_windows(&self) -> Result<()> {
        if self.windows.is_empty() {
            return Ok(());
        }
        let mut prev_end = 0.0;
        for (i, w) in self.windows.iter().enumerate() {
            let field = format!("window[{i}]");
            if !(w.start < w.end) {
                return Err(Error::config(field, format!("start {} must be before end {}", w.start, w.end)));
            }
            if (w.start - prev_end).abs() > TIME_TOL {
                let msg = if w.start > prev_end {
                    format!("gap between {prev_end} and {}", w.start)
                } else {
                    format!("overlaps the previous window (starts at {}, previous ends at {prev_end})", w.start)
                };
                return Err(Error::config(field, msg));
            }
            let (l, u) = (w.lower_level(), w.upper_level());
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::config(format!("{field}.lower"), format!("must be finite and >= 0, got {l}")));
            }
            if !(u > l) {
                return Err(Error::config(format!("{field}.upper"), format!("must exceed lower barrier {l}, got {u}")));
            }
            prev_end = w.end;
        }
        if (prev_end - self.maturity).abs() > TIME_TOL {
            return Err(Error::config(
                "window",
                format!("windows must cover [0, {}], last one ends at {prev_end}", self.maturity),
            ));
        }
        Ok(())
    }

    /// Vanilla terms of the option.
    pub fn option_spec(&self) -> Result<OptionSpec> {
        let spec = OptionSpec::new(self.payoff, self.strike, self.spot, self.monitoring)?;
        Ok(match self.direction {
            Direction::KnockOut => spec,
            Direction::KnockIn => spec.knock_in(),
        })
    }

    /// Uniform grid of `n` intervals with each interval assigned the window
    /// containing it. An interval straddling a window boundary is an error.
    pub fn term_structure(&self, n: usize) -> Result<MarketTermStructure> {
        if n == 0 {
            return Err(Error::config("steps", "step counts must be >= 1"));
        }
        let times: Vec<f64> = (0..=n).map(|i| self.maturity * i as f64 / n as f64).collect();
        let mut intervals = Vec::with_capacity(n);
        for t in times.windows(2) {
            let (lower, upper) = match self.windows.is_empty() {
                true => (0.0, f64::INFINITY),
                false => {
                    let mid = 0.5 * (t[0] + t[1]);
                    let w = self
                        .windows
                        .iter()
                        .find(|w| mid >= w.start && mid <= w.end)
                        .ok_or_else(|| Error::config("window", format!("no window covers t = {mid}")))?;
                    if t[0] < w.start - TIME_TOL || t[1] > w.end + TIME_TOL {
                        return Err(Error::config(
                            "steps",
                            format!(
                                "N = {n}: grid interval [{}, {}] straddles the window boundary of [{}, {}]",
                                t[0], t[1], w.start, w.end
                            ),
                        ));
                    }
                    (w.lower_level(), w.upper_level())
                }
            };
            let iv = Interval::new(t[1] - t[0], self.rate - self.dividend, self.volatility, self.rate, lower, upper)
                .map_err(|e| Error::config("window", e.to_string()))?;
            intervals.push(iv);
        }
        MarketTermStructure::new(times, intervals).map_err(|e| Error::config("steps", e.to_string()))
    }
}

fn toml_error_field(text: &str, e: &toml::de::Error) -> String {
    if let Some(span) = e.span() {
        let line_start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
        let line = text[line_start..].lines().next().unwrap_or("");
        if let Some((key, _)) = line.split_once('=') {
            let key = key.trim();
            if !key.is_empty() && !key.starts_with('[') {
                return key.to_string();
            }
        }
    }
    // "missing field `x`" and similar carry the key in backticks.
    e.message()
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "config".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
spot = 100.0
strike = 100.0
rate = 0.1
volatility = 0.3
maturity = 0.5
payoff = "call"
monitoring = "continuous"
methods = ["mc", "smc"]
steps = [1, 2, 4]
particles = 100
reps = 2
seed = 7

[[window]]
start = 0.0
end = 0.5
lower = 90.0
upper = 110.0
"#;

    fn field_of(text: &str) -> String {
        match ExperimentConfig::from_toml(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_the_example() {
        let cfg = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(cfg.methods, vec![Method::Mc, Method::Smc]);
        assert_eq!(cfg.direction, Direction::KnockOut);
        let term = cfg.term_structure(4).unwrap();
        assert_eq!(term.steps(), 4);
        assert!(term.intervals().iter().all(|iv| iv.lower == 90.0 && iv.upper == 110.0));
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn field_level_errors() {
        assert_eq!(field_of(&BASE.replace("volatility = 0.3", "volatility = -0.3")), "volatility");
        assert_eq!(field_of(&BASE.replace("reps = 2", "reps = 1")), "reps");
        assert_eq!(field_of(&BASE.replace("steps = [1, 2, 4]", "steps = [0]")), "steps");
        assert_eq!(field_of(&BASE.replace("particles = 100", "particles = 1")), "particles");
        assert_eq!(field_of(&BASE.replace("\"smc\"]", "\"smc3\"]")), "methods");
        assert_eq!(field_of(&BASE.replace("seed = 7", "seed = 7\ncolour = 1")), "colour");
        assert_eq!(field_of(&BASE.replace("strike = 100.0\n", "")), "strike");
        assert_eq!(field_of(&BASE.replace("upper = 110.0", "upper = 80.0")), "window[0].upper");
        assert_eq!(field_of(&BASE.replace("end = 0.5", "end = 0.4")), "window");
    }

    #[test]
    fn windows_must_tile() {
        let two = BASE.replace(
            "end = 0.5\nlower = 90.0\nupper = 110.0",
            "end = 0.25\nlower = 90.0\nupper = 110.0\n\n[[window]]\nstart = 0.3\nend = 0.5\nlower = 95.0",
        );
        assert_eq!(field_of(&two), "window[1]");
        let overlap = two.replace("start = 0.3", "start = 0.2");
        assert_eq!(field_of(&overlap), "window[1]");
    }

    #[test]
    fn windows_map_to_intervals_and_reject_straddles() {
        let two = BASE.replace(
            "end = 0.5\nlower = 90.0\nupper = 110.0",
            "end = 0.25\nlower = 90.0\nupper = 110.0\n\n[[window]]\nstart = 0.25\nend = 0.5\nlower = 95.0",
        );
        let cfg = ExperimentConfig::from_toml(&two.replace("steps = [1, 2, 4]", "steps = [2, 4]")).unwrap();
        let term = cfg.term_structure(4).unwrap();
        assert_eq!(term.interval(1).upper, 110.0);
        assert_eq!(term.interval(2).lower, 95.0);
        assert!(term.interval(3).upper.is_infinite());
        // N = 1 straddles t = 0.25.
        assert_eq!(field_of(&two), "steps");
    }

    #[test]
    fn no_windows_means_no_barriers() {
        let text = BASE.split("[[window]]").next().unwrap();
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert!(cfg.term_structure(2).unwrap().is_barrier_free());
    }
}
