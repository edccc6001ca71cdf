//! Truncated Hilbert series `Σ rank(CDer*_{σᵏ}) tᵏ` for cyclic groups.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cend::{GroupSpec, Morphism};
use crate::error::{Error, Result};
use crate::gmod::Parity;
use crate::lcsa::Algebra;
use crate::solver::{interior_constraints, solve_constraints, DegreeBound, InteriorKind};

/// Largest order searched when detecting `σⁿ = id`.
pub const ORDER_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HilbertWindow {
    pub k_min: i64,
    pub k_max: i64,
    pub bound: DegreeBound,
    pub interior: InteriorKind,
}

impl HilbertWindow {
    pub fn new(k_min: i64, k_max: i64, bound: DegreeBound, interior: InteriorKind) -> Result<Self> {
        if k_min > 0 || k_max < 0 {
            return Err(Error::Invalid(format!(
                "window [{k_min},{k_max}] must contain 0"
            )));
        }
        Ok(HilbertWindow {
            k_min,
            k_max,
            bound,
            interior,
        })
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn powers(&self) -> impl Iterator<Item = i64> {
        self.k_min..=self.k_max
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coefficient {
    pub k: i64,
    pub rank: usize,
    pub saturated: bool,
    /// Rendered bases of the even and odd pieces at the working bound.
    #[serde(skip)]
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub window: HilbertWindow,
    pub coefficients: Vec<Coefficient>,
    /// `None` when no `n ≤ ORDER_LIMIT` has `σⁿ = id`.
    pub order: Option<usize>,
    pub all_saturated: bool,
    /// Period-`order` agreement of the window coefficients.
    pub periodic_mod_order: bool,
    /// Folded polynomial `Σ_{k mod n} rank tᵏ` when the order is finite, the
    /// window is saturated and the coefficients agree mod the order.
    pub polynomial: Option<Vec<usize>>,
}

impl SeriesReport {
    pub fn coefficient(&self, k: i64) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.k == k)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.coefficients.iter().map(|c| c.rank).collect()
    }

    pub fn verdict(&self) -> &'static str {
        if !self.all_saturated {
            "inconclusive at bound"
        } else if self.polynomial.is_some() {
            "polynomial"
        } else {
            "not polynomial at window"
        }
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coefficients
            .iter()
            .map(|c| json!({"k": c.k, "rank": c.rank, "saturated": c.saturated}))
            .collect();
        json!({
            "window": [self.window.k_min, self.window.k_max],
            "interior": self.window.interior.as_str(),
            "bound": self.window.bound.to_json(),
            "coefficients": coeffs,
            "order": match self.order { Some(n) => json!(n), None => json!("infinite at window") },
            "periodicity": if self.periodic_mod_order { json!(self.order) } else { Value::Null },
            "polynomial": self.polynomial.as_ref().map(|p| render_laurent(&p.iter().enumerate().map(|(i, m)| (i as i64, *m as i64)).collect::<Vec<_>>())),
            "verdict": self.verdict(),
            "closed_form": Value::Null,
        })
    }
}

/// Rank over `ℚ[∂]` of the `σᵏ` piece, summed over both parities, with a
/// saturation flag from a re-solve at the next bound.
fn piece(alg: &Algebra, group: &GroupSpec, k: i64, w: &HilbertWindow) -> Result<Coefficient> {
    let cs = interior_constraints(group, k, w.interior)?;
    let mut rank = 0;
    let mut saturated = true;
    let mut fingerprint = String::new();
    for parity in [Parity::Even, Parity::Odd] {
        let here = solve_constraints(alg, &cs, parity, w.bound, "piece")?;
        let next = solve_constraints(alg, &cs, parity, w.bound.raised(1), "piece")?;
        let (r0, r1) = (here.rank_at_bound(), next.rank_at_bound());
        let (g0, g1) = (here.generator_indices().len(), next.generator_indices().len());
        saturated &= r0 == r1 && g0 == g1;
        rank += r1;
        for f in here.basis() {
            fingerprint.push_str(&format!("{:?};", f.render()));
        }
        fingerprint.push('|');
    }
    Ok(Coefficient {
        k,
        rank,
        saturated,
        fingerprint,
    })
}

pub fn series(alg: &Algebra, sigma: &Morphism, w: &HilbertWindow) -> Result<SeriesReport> {
    let group = GroupSpec::cyclic(alg, sigma)?;
    let coefficients = w
        .powers()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| piece(alg, &group, k, w))
        .collect::<Result<Vec<_>>>()?;
    let order = sigma.order(ORDER_LIMIT);
    let all_saturated = coefficients.iter().all(|c| c.saturated);
    let periodic_mod_order = match order {
        Some(n) => {
            let n = n as i64;
            coefficients.iter().all(|a| {
                coefficients
                    .iter()
                    .filter(|b| (b.k - a.k).rem_euclid(n) == 0)
                    .all(|b| b.rank == a.rank && b.fingerprint == a.fingerprint)
            })
        }
        None => false,
    };
    let polynomial = match order {
        Some(n) if all_saturated && periodic_mod_order => {
            let mut folded = vec![None; n];
            for c in &coefficients {
                folded[c.k.rem_euclid(n as i64) as usize] = Some(c.rank);
            }
            folded.into_iter().collect::<Option<Vec<_>>>()
        }
        _ => None,
    };
    Ok(SeriesReport {
        window: *w,
        coefficients,
        order,
        all_saturated,
        periodic_mod_order,
        polynomial,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub l0: usize,
    /// `mᵢ` for `i = 0..l0`.
    pub m: Vec<i64>,
    /// Window coefficients that differ from the periodic part.
    pub corrections: BTreeMap<i64, i64>,
}

impl ClosedForm {
    /// Coefficient of `tᵏ` in the expansion: `m_{(k−1) mod l0}` from the
    /// periodic part plus any correction.
    pub fn coefficient(&self, k: i64) -> i64 {
        let l = self.l0 as i64;
        self.m[(k - 1).rem_euclid(l) as usize] + self.corrections.get(&k).copied().unwrap_or(0)
    }

    pub fn render(&self) -> String {
        let l = self.l0 as i64;
        let pos: Vec<(i64, i64)> = self.m.iter().enumerate().map(|(i, &m)| (i as i64 + 1, m)).collect();
        let neg: Vec<(i64, i64)> = self
            .m
            .iter()
            .enumerate()
            .map(|(i, &m)| (-(l - 1 - i as i64), m))
            .collect();
        let mut s = format!(
            "({})/(1 - {}) + ({})/(1 - {})",
            render_laurent(&pos),
            render_monomial(l),
            render_laurent(&neg),
            render_monomial(-l)
        );
        let corr: Vec<(i64, i64)> = self.corrections.iter().map(|(k, c)| (*k, *c)).collect();
        if !corr.is_empty() {
            s.push_str(" + ");
            s.push_str(&render_laurent(&corr));
        }
        s
    }
}

fn render_monomial(e: i64) -> String {
    match e {
        0 => "1".into(),
        1 => "t".into(),
        _ => format!("t^{e}"),
    }
}

/// Render `Σ c tᵉ` with terms sorted by exponent.
pub fn render_laurent(terms: &[(i64, i64)]) -> String {
    let mut ts: Vec<(i64, i64)> = terms.iter().copied().filter(|(_, c)| *c != 0).collect();
    ts.sort();
    if ts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, (e, c)) in ts.into_iter().enumerate() {
        let (sign, a) = if c < 0 { ("-", -c) } else { ("+", c) };
        if n == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        match (a, e) {
            (_, 0) => out.push_str(&a.to_string()),
            (1, _) => out.push_str(&render_monomial(e)),
            _ => out.push_str(&format!("{a}*{}", render_monomial(e))),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Rationality {
    ClosedForm(ClosedForm),
    NotPeriodic,
    Inconclusive,
}

impl Rationality {
    pub fn verdict(&self) -> &'static str {
        match self {
            Rationality::ClosedForm(_) => "rational",
            Rationality::NotPeriodic => "no l0-periodicity detected",
            Rationality::Inconclusive => "inconclusive at bound",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Rationality::ClosedForm(c) => json!({
                "verdict": self.verdict(),
                "l0": c.l0,
                "m": c.m,
                "exceptions": c.corrections.keys().collect::<Vec<_>>(),
                "closed_form": c.render(),
            }),
            _ => json!({"verdict": self.verdict(), "closed_form": Value::Null}),
        }
    }
}

/// Detect `l0`-periodicity in a coefficient window outside a finite
/// exceptional set and return the matching closed form.
pub fn rationality_from_coefficients(coeffs: &[(i64, i64)], l0: usize) -> Result<Rationality> {
    if l0 == 0 {
        return Err(Error::Invalid("l0 must be positive".into()));
    }
    if coeffs.len() < 2 * l0 {
        return Err(Error::WindowTooShort(format!(
            "{} coefficients cannot exhibit two periods of length {l0}",
            coeffs.len()
        )));
    }
    let l = l0 as i64;
    let mut m = Vec::with_capacity(l0);
    for i in 0..l {
        let class: Vec<i64> = coeffs
            .iter()
            .filter(|(k, _)| (k - 1).rem_euclid(l) == i)
            .map(|(_, c)| *c)
            .collect();
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for c in &class {
            *counts.entry(*c).or_default() += 1;
        }
        match counts.into_iter().find(|(_, n)| 2 * n > class.len()) {
            Some((v, _)) => m.push(v),
            None => return Ok(Rationality::NotPeriodic),
        }
    }
    let mut form = ClosedForm {
        l0,
        m,
        corrections: BTreeMap::new(),
    };
    for &(k, c) in coeffs {
        let d = c - form.coefficient(k);
        if d != 0 {
            form.corrections.insert(k, d);
        }
    }
    debug_assert!(coeffs.iter().all(|&(k, c)| form.coefficient(k) == c));
    Ok(Rationality::ClosedForm(form))
}

pub fn rationality_probe(r: &SeriesReport, l0: usize) -> Result<Rationality> {
    let coeffs: Vec<(i64, i64)> = r.coefficients.iter().map(|c| (c.k, c.rank as i64)).collect();
    let verdict = rationality_from_coefficients(&coeffs, l0)?;
    if !r.all_saturated {
        return Ok(Rationality::Inconclusive);
    }
    Ok(verdict)
}
