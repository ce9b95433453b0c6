//! Verification runs that compare network computations with closed-form
//! predictions and collect the results into reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::{
    compatibility_residual, compatibility_residual_scaled, effective_resistance, resistance_diameter, SCALAR_TOL,
    STRUCTURAL_TOL,
};
use crate::error::{Error, Result};
use crate::functions::{pullback_sg, random_function, sg_harmonic, tent_on_segment};
use crate::network::{build_ssg, energy, form_components, LevelScales, Node};
use crate::sequence::{project, unproject, Divergence, MatchingSequence};
use crate::topology::{Address, Bond, Symmetry, Word};

type Seq = MatchingSequence<f64>;

/// Terms used for the sequence-level limit rows.
pub const LIMIT_TERMS: usize = 60;
pub const DIAMETER_BOUND: f64 = 4.0;
pub const GROWTH_FACTOR: f64 = 1.1;
/// Residual a deliberately broken configuration must exceed.
pub const CONTROL_TOL: f64 = 1e-3;
pub const SYMMETRY_CONTROL_TOL: f64 = 1e-6;
pub const RESISTANCE_TOL: f64 = 1e-10;
pub const FIXED_POINT_TOL: f64 = 1e-14;

/// Ten significant digits, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let s = format!("{:.*}", (9 - exp).max(0) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.9e}");
        let (mant, exp) = s.split_once('e').expect("exponent");
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{exp}")
    }
}

/// How a row is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// residual ≤ tolerance
    Within,
    /// computed ≤ predicted bound
    AtMost,
    /// computed > tolerance; used by negative controls
    Exceeds,
    /// reported only
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub quantity: String,
    pub computed: f64,
    pub predicted: Option<f64>,
    /// `|computed - predicted|`, divided by `|predicted|` when `relative`.
    pub residual: Option<f64>,
    pub relative: bool,
    pub tolerance: Option<f64>,
    pub check: Check,
    pub passed: bool,
    pub note: Option<String>,
}

impl Row {
    /// Relative residual unless the prediction is zero.
    pub fn within(quantity: impl Into<String>, computed: f64, predicted: f64, tolerance: f64) -> Row {
        let relative = predicted != 0.0;
        let diff = (computed - predicted).abs();
        let residual = if relative { diff / predicted.abs() } else { diff };
        Row {
            quantity: quantity.into(),
            computed,
            predicted: Some(predicted),
            residual: Some(residual),
            relative,
            tolerance: Some(tolerance),
            check: Check::Within,
            passed: residual <= tolerance,
            note: None,
        }
    }

    pub fn absolute(quantity: impl Into<String>, computed: f64, predicted: f64, tolerance: f64) -> Row {
        let residual = (computed - predicted).abs();
        Row {
            relative: false,
            residual: Some(residual),
            passed: residual <= tolerance,
            ..Row::within(quantity, computed, predicted, tolerance)
        }
    }

    pub fn at_most(quantity: impl Into<String>, computed: f64, bound: f64) -> Row {
        Row {
            quantity: quantity.into(),
            computed,
            predicted: Some(bound),
            residual: None,
            relative: false,
            tolerance: None,
            check: Check::AtMost,
            passed: computed <= bound,
            note: None,
        }
    }

    pub fn exceeds(quantity: impl Into<String>, computed: f64, threshold: f64) -> Row {
        Row {
            quantity: quantity.into(),
            computed,
            predicted: None,
            residual: None,
            relative: false,
            tolerance: Some(threshold),
            check: Check::Exceeds,
            passed: computed > threshold,
            note: None,
        }
    }

    pub fn info(quantity: impl Into<String>, computed: f64, note: impl Into<String>) -> Row {
        Row {
            quantity: quantity.into(),
            computed,
            predicted: None,
            residual: None,
            relative: false,
            tolerance: None,
            check: Check::Info,
            passed: true,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Row {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub thresholds: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
    pub passed: bool,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ExperimentReport {
    fn new(name: &str, seq: &Seq) -> Self {
        let mut parameters = BTreeMap::new();
        parameters.insert("sequence".to_string(), seq.to_json());
        ExperimentReport {
            name: name.to_string(),
            parameters,
            thresholds: BTreeMap::new(),
            rows: Vec::new(),
            passed: true,
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    fn threshold(mut self, key: &str, value: f64) -> Self {
        self.thresholds.insert(key.to_string(), value);
        self
    }

    fn push(&mut self, row: Row) {
        self.passed &= row.passed;
        self.rows.push(row);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Header lines starting with `#`, then one line per row.
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_default();
        let mut out = format!("# experiment: {}\n", self.name);
        for (k, v) in &self.parameters {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        for (k, v) in &self.thresholds {
            out.push_str(&format!("# threshold {k}: {}\n", fmt_sig(*v)));
        }
        out.push_str(&format!("# passed: {}\n", self.passed));
        out.push_str("quantity,computed,predicted,residual,relative,tolerance,check,passed,note\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                csv_field(&r.quantity),
                fmt_sig(r.computed),
                opt(r.predicted),
                opt(r.residual),
                r.relative,
                opt(r.tolerance),
                serde_json::to_value(r.check).expect("enum").as_str().expect("string"),
                r.passed,
                csv_field(r.note.as_deref().unwrap_or(""))
            ));
        }
        out
    }
}

fn require_level(name: &str, m: usize, max: usize) -> Result<()> {
    if m > max {
        return Err(Error::OutOfRange(format!("{name}: level {m} exceeds {max}")));
    }
    Ok(())
}

fn q0(b: [f64; 3]) -> f64 {
    (b[0] - b[1]).powi(2) + (b[1] - b[2]).powi(2) + (b[2] - b[0]).powi(2)
}

fn partial_product(seq: &Seq, m: usize) -> Result<f64> {
    let logs = (1..=m)
        .map(|i| Ok((-seq.rho(i)?).ln_1p()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(logs.iter().sum::<f64>().exp())
}

/// Compatibility of consecutive levels `m+1 → m` for `m < m_max`, plus a control
/// in which the second pair is broken.
pub fn exp_compat_chain(seq: &Seq, m_max: usize, tol: Option<f64>) -> Result<ExperimentReport> {
    require_level("compat", m_max, 5)?;
    let tol = tol.unwrap_or(STRUCTURAL_TOL);
    let mut rep = ExperimentReport::new("compat", seq)
        .param("m_max", m_max)
        .threshold("residual", tol)
        .threshold("control", CONTROL_TOL);
    for m in 0..m_max {
        let r = compatibility_residual(seq, m)?;
        rep.push(Row::absolute(
            format!("trace level {} onto level {m}", m + 1),
            r,
            0.0,
            tol,
        ));
    }
    let mut pairs: Vec<(f64, f64)> = seq.pairs(2)?.iter().map(|p| (p.r, p.rho)).collect();
    pairs[1].0 *= 0.8;
    let broken = compatibility_residual_scaled(&LevelScales::from_pairs(&pairs)?)?;
    rep.push(
        Row::exceeds(
            "control: level 2 onto level 1 with r_2 scaled by 0.8",
            broken,
            CONTROL_TOL,
        )
        .with_note("negative control"),
    );
    Ok(rep)
}

/// Energy of the pulled-back gasket harmonic function against `Q_0(b) / P_m`.
pub fn exp_sg_part(seq: &Seq, boundary: [f64; 3], m_max: usize, tol: Option<f64>) -> Result<ExperimentReport> {
    require_level("sgpart", m_max, 6)?;
    let tol = tol.unwrap_or(1e-10);
    let lim = seq.r_star()?;
    let q = q0(boundary);
    let mut rep = ExperimentReport::new("sgpart", seq)
        .param("m_max", m_max)
        .param("boundary", format!("{boundary:?}"))
        .threshold("level", tol)
        .threshold("limit", STRUCTURAL_TOL)
        .threshold("growth", GROWTH_FACTOR);
    let mut values = Vec::new();
    for m in 0..=m_max {
        let g = sg_harmonic(boundary, m)?;
        let u = pullback_sg(&g, m, 1)?;
        let e = energy(&build_ssg(seq, m, 1)?, &u)?;
        let p = if m == 0 { 1.0 } else { seq.derive(m)?.p };
        rep.push(Row::within(format!("level {m} SG energy"), e, q / p, tol));
        values.push(e);
    }
    match lim.divergence {
        Divergence::Converges => {
            for m in [40, LIMIT_TERMS] {
                let p = partial_product(seq, m)?;
                rep.push(Row::within(
                    format!("Q0/P_{m} against Q0·C*"),
                    q / p,
                    q * lim.c_star,
                    STRUCTURAL_TOL,
                ));
            }
        }
        Divergence::Diverges => {
            for m in 2..=m_max {
                rep.push(Row::exceeds(
                    format!("growth level {} to {m}", m - 1),
                    values[m] / values[m - 1],
                    GROWTH_FACTOR,
                ));
            }
            let p = partial_product(seq, LIMIT_TERMS)?;
            rep.push(Row::info(
                format!("Q0/P_{LIMIT_TERMS}"),
                q / p,
                "SG part degenerates: divergent series",
            ));
        }
    }
    Ok(rep)
}

/// Energy split of `pullback(h) + tent` into the gasket part and the line part.
pub fn exp_decomposition(seq: &Seq, m: usize, tol: Option<f64>) -> Result<ExperimentReport> {
    require_level("decomp", m, 6)?;
    if m == 0 {
        return Err(Error::OutOfRange("decomp: level must be at least 1".into()));
    }
    let tol = tol.unwrap_or(STRUCTURAL_TOL);
    let n = 2;
    let lim = seq.r_star()?;
    let gamma1 = seq.rho(1)?;
    let eta1 = seq.derive(1)?.eta;
    let mut rep = ExperimentReport::new("decomp", seq)
        .param("m", m)
        .param("subdiv", n)
        .threshold("network", tol)
        .threshold("scalar", SCALAR_TOL);
    let tent = tent_on_segment::<f64>(&Word::empty(), Bond::ALL[0], m, n)?;
    let tent_line = 4.0;
    let b = 1.0 / (1.0 - lim.r_star);
    rep.push(Row::within(
        "line part b·D_1(tent)/η_1",
        b * tent_line / eta1,
        tent_line / gamma1,
        SCALAR_TOL,
    ));
    match lim.divergence {
        Divergence::Converges => {
            let h = sg_harmonic([1.0, 0.0, 0.0], m)?;
            let u = pullback_sg(&h, m, n)?.add(&tent)?;
            let p = seq.derive(m)?.p;
            let e = energy(&build_ssg(seq, m, n)?, &u)?;
            rep.push(Row::within(format!("E level {m}"), e, 2.0 / p + 4.0 / gamma1, tol));
            let fc = form_components(seq, m, &u)?;
            let delta = seq.derive(m)?.delta;
            rep.push(Row::within("SG part Q_m/δ_m", fc.q_sigma / delta, 2.0 / p, tol));
            let line: f64 = fc.d_line.iter().zip(seq.gammas(m)?).map(|(d, g)| d / g).sum();
            rep.push(Row::within("line part Σ D_k/γ_k", line, 4.0 / gamma1, tol));
            let a = 1.0 / lim.r_star;
            rep.push(Row::within(
                "2/P_40 against a·E*(h)",
                2.0 / partial_product(seq, 40)?,
                a * 2.0,
                STRUCTURAL_TOL,
            ));
        }
        Divergence::Diverges => {
            for k in 1..=m {
                let e = energy(
                    &build_ssg(seq, k, n)?,
                    &tent_on_segment::<f64>(&Word::empty(), Bond::ALL[0], k, n)?,
                )?;
                rep.push(
                    Row::within(format!("E level {k} of tent"), e, tent_line / gamma1, tol)
                        .with_note("line part only: divergent series"),
                );
            }
        }
    }
    Ok(rep)
}

/// Idempotence, fixed points, `ρ_0`, the energy identity and the inverse of the projection.
pub fn exp_projection(seq: &Seq, terms: usize, tol: Option<f64>) -> Result<ExperimentReport> {
    if terms == 0 || terms > 100 {
        return Err(Error::OutOfRange(format!(
            "projection: terms must be in 1..=100, got {terms}"
        )));
    }
    let tol = tol.unwrap_or(SCALAR_TOL);
    let lim = seq.r_star()?;
    let mut rep = ExperimentReport::new("projection", seq)
        .param("terms", terms)
        .threshold("scalar", tol)
        .threshold("fixed point", FIXED_POINT_TOL);
    let l = project(seq, terms)?;
    let ll = project(&l, terms)?;
    let max_diff = |a: &Seq, b: &Seq| -> Result<f64> {
        (1..=terms).try_fold(0.0f64, |w, m| Ok(w.max((a.rho(m)? - b.rho(m)?).abs())))
    };
    rep.push(Row::absolute("max |L(L(R)) - L(R)|", max_diff(&ll, &l)?, 0.0, tol));

    let deltas = seq.deltas(terms)?;
    let sdeltas = l.deltas(terms)?;
    let mut worst = 0.0f64;
    for m in 1..=terms {
        let lhs = deltas[m - 1] * seq.rho(m)?;
        let rhs = lim.rho0 * sdeltas[m - 1] * l.rho(m)?;
        worst = worst.max((lhs - rhs).abs() / lhs);
    }
    rep.push(Row::absolute("energy identity, max relative residual", worst, 0.0, tol));

    match lim.divergence {
        Divergence::Diverges => {
            rep.push(Row::absolute(
                "max |L(R) - R|",
                max_diff(&l, seq)?,
                0.0,
                FIXED_POINT_TOL,
            ));
            rep.push(Row::info(
                "rho0",
                lim.rho0,
                format!("partial product over 200 terms {}", fmt_sig(partial_product(seq, 200)?)),
            ));
        }
        Divergence::Converges => {
            let direct = {
                let mut p = 1.0;
                let mut m = 1;
                while m <= 100_000 {
                    let r = seq.rho(m)?;
                    p *= 1.0 - r;
                    if r < 1e-18 {
                        break;
                    }
                    m += 1;
                }
                p
            };
            rep.push(Row::within(
                "rho0 against 1 - direct product",
                lim.rho0,
                1.0 - direct,
                tol,
            ));
            let back = unproject(&l, lim.rho0, terms)?;
            let mut worst = 0.0f64;
            for m in 1..=terms {
                let r = seq.rho(m)?;
                worst = worst.max((back.rho(m)? - r).abs() / r);
            }
            rep.push(Row::absolute(
                "unproject after project, max relative deviation",
                worst,
                0.0,
                tol,
            ));
            let mut prev = f64::NEG_INFINITY;
            let mut min_step = f64::INFINITY;
            let mut excess = f64::NEG_INFINITY;
            for m in 1..=LIMIT_TERMS {
                let a = seq.derive(m)?.alpha_m;
                min_step = min_step.min(a - prev);
                excess = excess.max(a - lim.rho0);
                prev = a;
            }
            rep.push(Row::at_most("-(smallest step of alpha_m)", -min_step, 0.0));
            rep.push(Row::at_most("max alpha_m - rho0", excess, 0.0));
            let sum: f64 = (1..=terms).map(|m| l.rho(m)).sum::<Result<f64>>()?;
            rep.push(Row::info("sum of projected weights", sum, "grows without bound"));
        }
    }
    Ok(rep)
}

/// Resistance diameter and corner-to-corner resistance per level.
pub fn exp_diameter(seq: &Seq, m_max: usize, tol: Option<f64>) -> Result<ExperimentReport> {
    require_level("diameter", m_max, 4)?;
    let tol = tol.unwrap_or(RESISTANCE_TOL);
    let mut rep = ExperimentReport::new("diameter", seq)
        .param("m_max", m_max)
        .threshold("diameter bound", DIAMETER_BOUND)
        .threshold("corner resistance", tol);
    let (p1, p2) = (
        Node::Vertex(Address::corner_of(1)?),
        Node::Vertex(Address::corner_of(2)?),
    );
    for m in 0..=m_max {
        let net = build_ssg(seq, m, 1)?;
        rep.push(Row::at_most(
            format!("diameter level {m}"),
            resistance_diameter(&net)?,
            DIAMETER_BOUND,
        ));
        rep.push(Row::within(
            format!("R(p1,p2) level {m}"),
            effective_resistance(&net, &p1, &p2)?,
            2.0 / 3.0,
            tol,
        ));
    }
    Ok(rep)
}

/// Energy of a random function under the six relabelings, with a corrupted-weight control.
pub fn exp_symmetry(seq: &Seq, m: usize, seed: u64, tol: Option<f64>) -> Result<ExperimentReport> {
    require_level("symmetry", m, 4)?;
    let tol = tol.unwrap_or(SCALAR_TOL);
    let n = 2;
    let mut rep = ExperimentReport::new("symmetry", seq)
        .param("m", m)
        .param("seed", seed)
        .param("subdiv", n)
        .threshold("residual", tol)
        .threshold("control", SYMMETRY_CONTROL_TOL);
    let net = build_ssg(seq, m, n)?;
    let f = random_function::<f64>(seed, m, n)?;
    let base = energy(&net, &f)?;
    for s in Symmetry::all() {
        rep.push(Row::within(
            format!("symmetry {s}"),
            energy(&net, &f.compose_symmetry(s))?,
            base,
            tol,
        ));
    }
    let bad = net.with_edge_scaled(0, 1.5)?;
    let bad_base = energy(&bad, &f)?;
    let mut worst = 0.0f64;
    for s in Symmetry::all() {
        worst = worst.max((energy(&bad, &f.compose_symmetry(s))? - bad_base).abs() / bad_base);
    }
    rep.push(
        Row::exceeds("control: one edge scaled by 1.5", worst, SYMMETRY_CONTROL_TOL).with_note("negative control"),
    );
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(2.0 / 3.0), "0.6666666667");
        assert_eq!(fmt_sig(128.0 / 21.0), "6.095238095");
        assert_eq!(fmt_sig(4.0), "4");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(-0.25), "-0.25");
        assert_eq!(fmt_sig(1.5e-12), "1.5e-12");
        assert_eq!(fmt_sig(1e-9), "1e-9");
        assert_eq!(fmt_sig(123456789012.0), "1.23456789e11");
    }

    #[test]
    fn row_semantics() {
        assert!(Row::within("a", 1.0 + 1e-13, 1.0, 1e-12).passed);
        assert!(!Row::within("a", 1.1, 1.0, 1e-12).passed);
        let z = Row::within("z", 1e-13, 0.0, 1e-12);
        assert!(!z.relative && z.passed);
        assert!(Row::at_most("d", 3.9, 4.0).passed);
        assert!(!Row::at_most("d", 4.1, 4.0).passed);
        assert!(Row::exceeds("c", 0.1, 1e-3).passed);
        assert!(!Row::exceeds("c", 1e-4, 1e-3).passed);
    }

    #[test]
    fn compat_report() {
        let rep = exp_compat_chain(&Seq::constant(0.25).unwrap(), 3, None).unwrap();
        assert!(rep.passed, "{}", rep.to_csv());
        assert_eq!(rep.rows.len(), 4);
        assert!(rep.rows[3].computed > 1e-3);
        assert!(exp_compat_chain(&Seq::constant(0.25).unwrap(), 6, None).is_err());
    }

    #[test]
    fn sg_part_report() {
        let g = Seq::geometric(0.5, 0.5).unwrap();
        let rep = exp_sg_part(&g, [1.0, 0.0, 0.0], 3, None).unwrap();
        assert!(rep.passed, "{}", rep.to_csv());
        assert!((rep.rows[3].computed - 128.0 / 21.0).abs() < 1e-10);
        let limit = rep.rows.last().unwrap();
        assert!((limit.predicted.unwrap() - 6.925493).abs() < 1e-6);
        let c = exp_sg_part(&Seq::constant(0.25).unwrap(), [1.0, 0.0, 0.0], 4, None).unwrap();
        assert!(c.passed, "{}", c.to_csv());
        assert_eq!(c.rows.last().unwrap().check, Check::Info);
    }

    #[test]
    fn decomposition_report() {
        let rep = exp_decomposition(&Seq::geometric(0.5, 0.5).unwrap(), 3, None).unwrap();
        assert!(rep.passed, "{}", rep.to_csv());
        let c = exp_decomposition(&Seq::constant(0.25).unwrap(), 3, None).unwrap();
        assert!(c.passed, "{}", c.to_csv());
        assert!(c.rows.iter().skip(1).all(|r| (r.computed - 16.0).abs() < 1e-9));
    }

    #[test]
    fn projection_report() {
        let c = exp_projection(&Seq::constant(0.25).unwrap(), 30, None).unwrap();
        assert!(c.passed, "{}", c.to_csv());
        let g = exp_projection(&Seq::geometric(0.5, 0.5).unwrap(), 30, None).unwrap();
        assert!(g.passed, "{}", g.to_csv());
        let rho0 = g.rows.iter().find(|r| r.quantity.starts_with("rho0")).unwrap();
        assert!((rho0.computed - 0.7112119049).abs() < 1e-10);
        assert!(exp_projection(&Seq::constant(0.25).unwrap(), 101, None).is_err());
    }

    #[test]
    fn diameter_report() {
        let rep = exp_diameter(&Seq::constant(0.25).unwrap(), 3, None).unwrap();
        assert!(rep.passed, "{}", rep.to_csv());
        assert!((rep.rows[0].computed - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetry_report() {
        let rep = exp_symmetry(&Seq::geometric(0.5, 0.5).unwrap(), 3, 7, None).unwrap();
        assert!(rep.passed, "{}", rep.to_csv());
        assert_eq!(rep.rows[0].residual, Some(0.0));
        assert!(rep.rows.last().unwrap().computed > 1e-6);
    }

    #[test]
    fn reports_are_deterministic_and_roundtrip() {
        let seq = Seq::harmonic(0.5).unwrap();
        let a = exp_symmetry(&seq, 2, 3, None).unwrap();
        let b = exp_symmetry(&seq, 2, 3, None).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        for rep in [a, exp_projection(&Seq::geometric(0.5, 0.5).unwrap(), 20, None).unwrap()] {
            assert_eq!(ExperimentReport::from_json(&rep.to_json()).unwrap(), rep);
        }
    }

    #[test]
    fn tolerance_override_is_recorded() {
        let rep = exp_compat_chain(&Seq::constant(0.25).unwrap(), 1, Some(1e-30)).unwrap();
        assert_eq!(rep.thresholds["residual"], 1e-30);
    }
}
