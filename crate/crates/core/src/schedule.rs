//! Control schedules and annealing envelopes.
//!
//! Times are in microseconds, envelope energies in GHz.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::SpinState;

/// Anchor list `(time_us, value)`, linearly interpolated between anchors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct PiecewiseLinearSchedule {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinearSchedule {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a schedule needs at least 2 points"));
        }
        if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::invalid("schedule points must be finite"));
        }
        if points[0].0 != 0.0 {
            return Err(Error::invalid(format!(
                "schedule must start at time 0, starts at {}",
                points[0].0
            )));
        }
        if let Some(w) = points.windows(2).position(|w| w[1].0 < w[0].0) {
            return Err(Error::invalid(format!(
                "schedule times decrease at point {}",
                w + 1
            )));
        }
        if points.last().map(|p| p.0) == Some(0.0) {
            return Err(Error::invalid("schedule has zero duration"));
        }
        Ok(Self { points })
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| (p[0], p[1])).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn duration(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    pub fn first_value(&self) -> f64 {
        self.points[0].1
    }

    pub fn last_value(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    /// Value at `t`. At a time shared by several anchors the last one wins.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.duration()).contains(&t) {
            return Err(Error::invalid(format!(
                "time {t} outside schedule range [0, {}]",
                self.duration()
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        // index of the last anchor with time <= t
        let i = self.points.partition_point(|p| p.0 <= t).saturating_sub(1);
        if i + 1 >= self.points.len() {
            return self.points[i].1;
        }
        let (t0, v0) = self.points[i];
        let (t1, v1) = self.points[i + 1];
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }

    /// All anchor times multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid(format!("time scale {factor} must be positive")));
        }
        Self::new(self.points.iter().map(|&(t, v)| (t * factor, v)).collect())
    }

    /// All values multiplied by `factor`.
    pub fn amplified(&self, factor: f64) -> Result<Self> {
        Self::new(self.points.iter().map(|&(t, v)| (t, v * factor)).collect())
    }

    /// Distinct anchor times, ascending.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        let mut last = None;
        self.points.iter().filter_map(move |&(t, _)| {
            if last == Some(t) {
                None
            } else {
                last = Some(t);
                Some(t)
            }
        })
    }
}

impl TryFrom<Vec<[f64; 2]>> for PiecewiseLinearSchedule {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::from_pairs(&v)
    }
}

impl From<PiecewiseLinearSchedule> for Vec<[f64; 2]> {
    fn from(s: PiecewiseLinearSchedule) -> Self {
        s.points.into_iter().map(|(t, v)| [t, v]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HGainLimits {
    pub max_points: usize,
    pub max_magnitude: f64,
    /// Per microsecond.
    pub max_slope: f64,
}

impl Default for HGainLimits {
    fn default() -> Self {
        Self {
            max_points: 20,
            max_magnitude: 3.0,
            max_slope: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleViolation {
    TooManyPoints { count: usize, max: usize },
    Magnitude { point: usize, value: f64, max: f64 },
    Slope { segment: usize, slope: f64, max: f64 },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooManyPoints { count, max } => {
                write!(f, "{count} points exceed the maximum of {max}")
            }
            Self::Magnitude { point, value, max } => {
                write!(f, "point {point}: |{value}| exceeds {max}")
            }
            Self::Slope { segment, slope, max } => {
                write!(f, "segment {segment}: slope {slope} exceeds {max} per us")
            }
        }
    }
}

/// Lists every device-limit violation; an empty list means the schedule is
/// programmable. Negative values are allowed.
pub fn validate_hgain_schedule(
    sched: &PiecewiseLinearSchedule,
    limits: &HGainLimits,
) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    let pts = sched.points();
    if pts.len() > limits.max_points {
        out.push(ScheduleViolation::TooManyPoints {
            count: pts.len(),
            max: limits.max_points,
        });
    }
    for (i, &(_, v)) in pts.iter().enumerate() {
        if v.abs() > limits.max_magnitude {
            out.push(ScheduleViolation::Magnitude {
                point: i,
                value: v,
                max: limits.max_magnitude,
            });
        }
    }
    for (i, w) in pts.windows(2).enumerate() {
        let (dt, dv) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        let slope = if dt > 0.0 {
            dv / dt
        } else if dv == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(dv)
        };
        if slope.abs() > limits.max_slope {
            out.push(ScheduleViolation::Slope {
                segment: i,
                slope,
                max: limits.max_slope,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub s: f64,
    pub a_ghz: f64,
    pub b_ghz: f64,
}

/// Transverse-field and problem-energy scales `A(s)`, `B(s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum AnnealEnvelope {
    /// `A = a_max (1-s)^2`, `B = b_max s`.
    Analytic { a_max: f64, b_max: f64 },
    /// Tabulated rows, linear interpolation in `s`.
    Table(Vec<EnvelopeRow>),
}

pub const DEFAULT_A_MAX_GHZ: f64 = 6.0;
pub const DEFAULT_B_MAX_GHZ: f64 = 12.0;

pub fn default_envelope() -> AnnealEnvelope {
    AnnealEnvelope::Analytic {
        a_max: DEFAULT_A_MAX_GHZ,
        b_max: DEFAULT_B_MAX_GHZ,
    }
}

/// Tolerance on `A(1)` being zero.
const A_END_TOLERANCE_GHZ: f64 = 1e-3;

/// Checks envelope invariants; failures carry the 1-based row number.
fn check_envelope(rows: &[EnvelopeRow]) -> std::result::Result<(), (usize, String)> {
    if rows.len() < 2 {
        return Err((rows.len(), "an envelope needs at least 2 rows".into()));
    }
    for (i, r) in rows.iter().enumerate() {
        if !(r.s.is_finite() && r.a_ghz.is_finite() && r.b_ghz.is_finite()) {
            return Err((i + 1, "non-finite value".into()));
        }
        if r.a_ghz < 0.0 || r.b_ghz < 0.0 {
            return Err((i + 1, "negative energy".into()));
        }
    }
    if rows[0].s != 0.0 {
        return Err((1, "s must start at 0".into()));
    }
    for (i, w) in rows.windows(2).enumerate() {
        let row = i + 2;
        if w[1].s <= w[0].s {
            return Err((row, "s is not strictly increasing".into()));
        }
        if w[1].a_ghz > w[0].a_ghz {
            return Err((row, "A increases".into()));
        }
        if w[1].b_ghz < w[0].b_ghz {
            return Err((row, "B decreases".into()));
        }
    }
    let last = rows[rows.len() - 1];
    if last.s != 1.0 {
        return Err((rows.len(), "s must end at 1".into()));
    }
    if last.a_ghz > A_END_TOLERANCE_GHZ {
        return Err((
            rows.len(),
            format!("A(1) = {} GHz is not approximately zero", last.a_ghz),
        ));
    }
    Ok(())
}

pub fn load_envelope(rows: Vec<EnvelopeRow>) -> Result<AnnealEnvelope> {
    check_envelope(&rows).map_err(|(row, msg)| Error::invalid(format!("row {row}: {msg}")))?;
    Ok(AnnealEnvelope::Table(rows))
}

/// Reads `s,A_GHz,B_GHz` text. Row numbers in errors are file lines.
pub fn parse_envelope_csv(text: &str) -> Result<AnnealEnvelope> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(Some(1), e.to_string()))?
        .clone();
    let expected = ["s", "A_GHz", "B_GHz"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::parse(
            Some(1),
            format!("expected header `s,A_GHz,B_GHz`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize);
        if record.len() != 3 {
            return Err(Error::parse(line, "expected 3 fields"));
        }
        let field = |k: usize| -> Result<f64> {
            record[k]
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("`{}` is not a number", &record[k])))
        };
        rows.push(EnvelopeRow {
            s: field(0)?,
            a_ghz: field(1)?,
            b_ghz: field(2)?,
        });
        lines.push(line);
    }
    check_envelope(&rows).map_err(|(row, msg)| {
        let line = row.checked_sub(1).and_then(|r| lines.get(r).copied().flatten());
        Error::parse(line, msg)
    })?;
    Ok(AnnealEnvelope::Table(rows))
}

impl AnnealEnvelope {
    /// `(A(s), B(s))` in GHz; `s` is clamped into `[0, 1]`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let s = s.clamp(0.0, 1.0);
        match self {
            Self::Analytic { a_max, b_max } => {
                let a = if s == 1.0 { 0.0 } else { a_max * (1.0 - s) * (1.0 - s) };
                (a, b_max * s)
            }
            Self::Table(rows) => {
                let i = rows.partition_point(|r| r.s <= s).saturating_sub(1);
                if i + 1 >= rows.len() {
                    let r = rows[rows.len() - 1];
                    return (r.a_ghz, r.b_ghz);
                }
                let (r0, r1) = (rows[i], rows[i + 1]);
                let f = (s - r0.s) / (r1.s - r0.s);
                (
                    r0.a_ghz + (r1.a_ghz - r0.a_ghz) * f,
                    r0.b_ghz + (r1.b_ghz - r0.b_ghz) * f,
                )
            }
        }
    }

    /// Same envelope with the transverse field removed.
    pub fn without_transverse_field(&self) -> AnnealEnvelope {
        match self {
            Self::Analytic { b_max, .. } => Self::Analytic {
                a_max: 0.0,
                b_max: *b_max,
            },
            Self::Table(rows) => Self::Table(
                rows.iter()
                    .map(|r| EnvelopeRow { a_ghz: 0.0, ..*r })
                    .collect(),
            ),
        }
    }

    pub fn to_csv(&self, samples: usize) -> String {
        let mut out = String::from("s,A_GHz,B_GHz\n");
        let rows: Vec<EnvelopeRow> = match self {
            Self::Table(rows) => rows.clone(),
            Self::Analytic { .. } => (0..=samples.max(1))
                .map(|k| {
                    let s = k as f64 / samples.max(1) as f64;
                    let (a, b) = self.eval(s);
                    EnvelopeRow { s, a_ghz: a, b_ghz: b }
                })
                .collect(),
        };
        for r in rows {
            out.push_str(&format!("{:?},{:?},{:?}\n", r.s, r.a_ghz, r.b_ghz));
        }
        out
    }
}

/// Everything needed to run one anneal.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSpec {
    pub anneal_schedule: PiecewiseLinearSchedule,
    pub hgain_schedule: Option<PiecewiseLinearSchedule>,
    pub annealing_time: f64,
    /// Present exactly for reverse anneals.
    pub initial_state: Option<SpinState>,
    pub num_reads: u64,
    pub reinitialize_state: bool,
    pub time_scale: f64,
}

impl AnnealSpec {
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12 * self.annealing_time.max(1.0);
        if !(self.annealing_time > 0.0 && self.annealing_time.is_finite()) {
            return Err(Error::invalid("annealing_time must be positive"));
        }
        if !(self.time_scale > 0.0 && self.time_scale.is_finite()) {
            return Err(Error::invalid("time_scale must be positive"));
        }
        if self.num_reads == 0 {
            return Err(Error::invalid("num_reads must be positive"));
        }
        let s = &self.anneal_schedule;
        if (s.duration() - self.annealing_time).abs() > tol {
            return Err(Error::invalid(format!(
                "anneal schedule spans [0, {}] but annealing_time is {}",
                s.duration(),
                self.annealing_time
            )));
        }
        if s.points().iter().any(|&(_, v)| !(0.0..=1.0).contains(&v)) {
            return Err(Error::invalid("anneal fraction outside [0, 1]"));
        }
        if self.initial_state.is_some() {
            if s.first_value() != 1.0 || s.last_value() != 1.0 {
                return Err(Error::invalid(
                    "a reverse anneal schedule must start and end at s = 1",
                ));
            }
        } else if s.first_value() != 0.0 || s.last_value() != 1.0 {
            return Err(Error::invalid(
                "a forward anneal schedule must start at s = 0 and end at s = 1",
            ));
        }
        if let Some(g) = &self.hgain_schedule {
            if (g.duration() - self.annealing_time).abs() > tol {
                return Err(Error::invalid(format!(
                    "h-gain schedule spans [0, {}] but annealing_time is {}",
                    g.duration(),
                    self.annealing_time
                )));
            }
        }
        Ok(())
    }

    /// `(s(t), g(t))`; `g` is 1 without an h-gain schedule.
    pub fn controls(&self, t: f64) -> (f64, f64) {
        let s = self.anneal_schedule.eval_unchecked(t);
        let g = self
            .hgain_schedule
            .as_ref()
            .map_or(1.0, |g| g.eval_unchecked(t));
        (s, g)
    }

    /// Union of both schedules' anchor times.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.anneal_schedule.breakpoints().collect();
        if let Some(g) = &self.hgain_schedule {
            ts.extend(g.breakpoints());
        }
        ts.push(self.annealing_time);
        ts.retain(|t| *t <= self.annealing_time);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}
