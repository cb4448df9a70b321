use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use super::fit::{fit_rate, RateFit};
use crate::error::Result;

/// Errors at or below this level count as exact agreement.
pub const EXACT_LEVEL: f64 = 1e-9;
/// Points needed before a slope is judged.
pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Every error is at round-off level.
    Exact,
    /// Measured and reported, no rate asserted.
    Reported,
    /// Fewer than [`MIN_POINTS`] usable points.
    Insufficient,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Exact => "exact",
            Verdict::Reported => "none",
            Verdict::Insufficient => "insufficient",
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Insufficient)
    }
}

/// One estimate measured over the `eps` sweep.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub tag: String,
    pub t: Option<f64>,
    pub norm: String,
    /// `(eps, error)` in sweep order.
    pub points: Vec<(f64, f64)>,
    /// Minimal slope; `None` for estimates reported without a verdict.
    pub threshold: Option<f64>,
    pub fit: Option<RateFit>,
    pub verdict: Verdict,
}

impl Estimate {
    pub fn new(tag: &str, t: Option<f64>, norm: &str, points: Vec<(f64, f64)>, threshold: Option<f64>) -> Self {
        let all_exact = points.iter().all(|&(_, e)| e <= EXACT_LEVEL);
        let usable: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, e)| e > 0.0).collect();
        let fit = if usable.len() >= 2 {
            fit_rate(&usable).ok()
        } else {
            None
        };
        let verdict = if all_exact && !points.is_empty() {
            Verdict::Exact
        } else if let Some(th) = threshold {
            match fit {
                Some(f) if usable.len() >= MIN_POINTS => {
                    if f.slope >= th {
                        Verdict::Pass
                    } else {
                        Verdict::Fail
                    }
                }
                _ => Verdict::Insufficient,
            }
        } else {
            Verdict::Reported
        };
        Self {
            tag: tag.to_string(),
            t,
            norm: norm.to_string(),
            points,
            threshold,
            fit,
            verdict,
        }
    }

    /// Report label: the tag, suffixed with the time when there is one.
    pub fn label(&self) -> String {
        match self.t {
            Some(t) => format!("{}@t={}", self.tag, t),
            None => self.tag.clone(),
        }
    }

    pub fn max_error(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

/// Outcome of a sweep.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub dim: usize,
    pub estimates: Vec<Estimate>,
    pub wall_time: Duration,
}

impl RateReport {
    /// Verdicts are strict only in dimension 1; in higher dimension they are indicative.
    pub fn strict(&self) -> bool {
        self.dim == 1
    }

    pub fn failures(&self) -> Vec<&Estimate> {
        self.estimates.iter().filter(|e| e.verdict.is_failure()).collect()
    }

    pub fn passed(&self) -> bool {
        !self.strict() || self.failures().is_empty()
    }

    pub fn estimate(&self, tag: &str, t: Option<f64>) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.tag == tag && e.t == t)
    }

    /// `estimate,eps,t,error,norm` with full precision.
    pub fn csv(&self) -> String {
        let mut out = String::from("estimate,eps,t,error,norm\n");
        for e in &self.estimates {
            for &(eps, err) in &e.points {
                let t = e.t.map(|t| format!("{t:.17e}")).unwrap_or_default();
                let _ = writeln!(out, "{},{eps:.17e},{t},{err:.17e},{}", e.tag, e.norm);
            }
        }
        out
    }

    /// One line per estimate: `tag slope intercept verdict`.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for e in &self.estimates {
            let (s, i) = e
                .fit
                .map(|f| (format!("{:.6}", f.slope), format!("{:.6}", f.intercept)))
                .unwrap_or_else(|| ("nan".into(), "nan".into()));
            let mut verdict = e.verdict.label().to_string();
            if !self.strict() && matches!(e.verdict, Verdict::Pass | Verdict::Fail) {
                verdict = format!("indicative-{verdict}");
            }
            let _ = writeln!(out, "{} {s} {i} {verdict}", e.label());
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("rates.csv"), self.csv())?;
        std::fs::write(dir.join("report.txt"), self.text())?;
        Ok(())
    }

    pub fn merge(mut self, other: RateReport) -> Self {
        self.estimates.extend(other.estimates);
        self.wall_time += other.wall_time;
        self
    }
}
