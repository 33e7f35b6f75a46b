//! One-parameter sweeps over a scenario family, one row of bounds per angle.

use serde::{Deserialize, Serialize};

use crate::config::BoundConfig;
use crate::error::{Error, Result};
use crate::product::UpperBound;
use crate::report::{BoundReport, Sections};
use crate::scenarios::ScenarioKind;
use crate::tolerance::le_within;

/// CSV column names; `theta` is in radians.
pub const CSV_HEADER: &str = "theta,v_a,v_b,product,sum,l1,mondal_in,schrodinger,max_perm_in,u1,l2,mondal_sum,u2,entropic_product,entropic_sum,entropic_premise";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub v_a: f64,
    pub v_b: f64,
    pub product: f64,
    pub sum: f64,
    pub l1: f64,
    pub mondal_in: f64,
    pub schrodinger: f64,
    pub max_perm_in: f64,
    pub u1: UpperBound,
    pub l2: f64,
    pub mondal_sum: f64,
    pub u2: f64,
    pub entropic_product: f64,
    pub entropic_sum: f64,
    pub entropic_premise: bool,
}

/// Parses `a:b:steps`, where the endpoints may use `pi`
/// (`0:pi/2:201`, `-pi:2pi:5`, `0:3*pi/4:10`).
pub fn parse_theta_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, steps] = parts.as_slice() else {
        return Err(Error::Schema(format!("theta range {text:?} must look like start:end:steps")));
    };
    let (a, b) = (parse_angle(a)?, parse_angle(b)?);
    let steps: usize =
        steps.trim().parse().map_err(|_| Error::Schema(format!("step count {steps:?} is not a positive integer")))?;
    if steps < 2 {
        return Err(Error::Schema(format!("need at least 2 steps, got {steps}")));
    }
    Ok(theta_grid(a, b, steps))
}

/// `steps` evenly spaced angles including both endpoints exactly.
pub fn theta_grid(a: f64, b: f64, steps: usize) -> Vec<f64> {
    let last = steps - 1;
    (0..steps).map(|i| if i == last { b } else { a + (b - a) * (i as f64 / last as f64) }).collect()
}

/// A product/quotient of factors, each a number, `pi`, or a number directly
/// followed by `pi`; an optional leading minus sign.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Schema(format!("cannot parse angle {text:?}"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.as_str()),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = parse_factor(&rest[..end]).ok_or_else(bad)?;
        value = if op == '*' { value * factor } else { value / factor };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(sign * value)
}

fn parse_factor(f: &str) -> Option<f64> {
    let lower = f.to_ascii_lowercase();
    match lower.strip_suffix("pi") {
        Some("") => Some(std::f64::consts::PI),
        Some(num) => num.parse::<f64>().ok().map(|v| v * std::f64::consts::PI),
        None => lower.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

impl SweepRow {
    pub fn from_report(theta: f64, report: &BoundReport) -> Self {
        let p = report.product.as_ref().expect("sweep reports carry the product section");
        let s = report.sum.as_ref().expect("sweep reports carry the sum section");
        let entropic = p.entropic.as_ref();
        Self {
            theta,
            v_a: report.variances.v_a,
            v_b: report.variances.v_b,
            product: report.variances.product,
            sum: report.variances.sum,
            l1: p.l1.unwrap_or(p.chain[0]),
            mondal_in: p.mondal_in,
            schrodinger: p.schrodinger,
            max_perm_in: p.max_perm_in.value,
            u1: p.u1.clone(),
            l2: s.l2,
            mondal_sum: s.mondal_sum,
            u2: s.u2,
            entropic_product: entropic.map_or(p.chain[0], |e| e.value),
            entropic_sum: s.entropic.value,
            entropic_premise: s.entropic.premise_holds && entropic.is_none_or(|e| e.premise_holds),
        }
    }

    /// Names of bounds that fail to bracket the value they bound.
    pub fn containment_failures(&self, rel: f64) -> Vec<String> {
        let mut failures = Vec::new();
        let mut lower = |name: &str, bound: f64, value: f64| {
            if !le_within(bound, value, rel) {
                failures.push(format!("{name} = {bound:?} exceeds {value:?}"));
            }
        };
        for (name, bound) in [
            ("l1", self.l1),
            ("mondal_in", self.mondal_in),
            ("schrodinger", self.schrodinger),
            ("max_perm_in", self.max_perm_in),
        ] {
            lower(name, bound, self.product);
        }
        if let Some(u) = self.u1.finite() {
            lower("product", self.product, u);
        }
        lower("l2", self.l2, self.sum);
        lower("mondal_sum", self.mondal_sum, self.sum);
        lower("sum", self.sum, self.u2);
        if self.entropic_premise {
            lower("entropic_product", self.entropic_product, self.product);
            lower("entropic_sum", self.entropic_sum, self.sum);
        }
        failures
    }

    pub fn csv_line(&self) -> String {
        let u1 = match self.u1.finite() {
            Some(v) => num(v),
            None => "inf".to_string(),
        };
        [
            num(self.theta),
            num(self.v_a),
            num(self.v_b),
            num(self.product),
            num(self.sum),
            num(self.l1),
            num(self.mondal_in),
            num(self.schrodinger),
            num(self.max_perm_in),
            u1,
            num(self.l2),
            num(self.mondal_sum),
            num(self.u2),
            num(self.entropic_product),
            num(self.entropic_sum),
            self.entropic_premise.to_string(),
        ]
        .join(",")
    }
}

/// Shortest representation that parses back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn compute_row(kind: &ScenarioKind, config: &BoundConfig, theta: f64) -> Result<SweepRow> {
    let (a, b) = kind.observables();
    let state = kind.state(theta)?;
    let report = BoundReport::compute(&state, &a, &b, config, Sections::BOTH)?;
    Ok(SweepRow::from_report(theta, &report))
}

/// Computes all rows (in parallel when enabled) and returns them in `thetas`
/// order; rows that break containment by more than `rel` abort the sweep.
pub fn run_sweep(kind: &ScenarioKind, thetas: &[f64], config: &BoundConfig, rel: f64) -> Result<Vec<SweepRow>> {
    let (a, _) = kind.observables();
    if a.dim() < 2 {
        return Err(Error::DimensionTooSmall { min: 2, found: a.dim() });
    }
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<SweepRow>> = {
        use rayon::prelude::*;
        thetas.par_iter().map(|&t| compute_row(kind, config, t)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<SweepRow>> = thetas.iter().map(|&t| compute_row(kind, config, t)).collect();

    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    for (i, row) in rows.iter().enumerate() {
        let failures = row.containment_failures(rel);
        if !failures.is_empty() {
            return Err(Error::Containment { row: i, theta: row.theta, detail: failures.join("; ") });
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows are serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_expressions() {
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle(" 1.5 ").unwrap(), 1.5);
        for bad in ["", "-", "pie", "1/0", "x", "pi//2"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ranges() {
        let t = parse_theta_range("0:pi/2:201").unwrap();
        assert_eq!(t.len(), 201);
        assert_eq!((t[0], t[200]), (0.0, PI / 2.0));
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(parse_theta_range("1:2:2").unwrap(), vec![1.0, 2.0]);
        for bad in ["0:1", "0:1:1", "0:1:x", "a:1:3", "0:1:3:4"] {
            assert!(matches!(parse_theta_range(bad), Err(Error::Schema(_))), "{bad}");
        }
    }

    #[test]
    fn spin1_sweep_rows() {
        let thetas = parse_theta_range("0:pi/2:21").unwrap();
        let rows = run_sweep(&ScenarioKind::Spin1LxLy, &thetas, &BoundConfig::default(), 1e-9).unwrap();
        assert_eq!(rows.len(), 21);
        for r in &rows {
            assert!(le_within(r.mondal_in, r.l1, 1e-9));
            assert!(le_within(r.mondal_sum, r.l2, 1e-9));
        }
        assert!((rows[0].product - 0.25).abs() < 1e-14);
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().count(), 22);
        assert_eq!(csv, to_csv(&run_sweep(&ScenarioKind::Spin1LxLy, &thetas, &BoundConfig::default(), 1e-9).unwrap()));
        let back: Vec<SweepRow> = serde_json::from_str(&to_json(&rows)).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn uncertified_u1_prints_inf() {
        let rows = run_sweep(&ScenarioKind::Spin1LxLy, &[0.0], &BoundConfig::default(), 1e-9).unwrap();
        let line = rows[0].csv_line();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), CSV_HEADER.split(',').count());
        if rows[0].u1.finite().is_none() {
            assert_eq!(fields[9], "inf");
        } else {
            assert_eq!(fields[9].parse::<f64>().unwrap(), rows[0].u1.value());
        }
    }
}
