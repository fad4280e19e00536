use crate::barriers::almost_max_threshold;
use crate::error::{Error, Result};
use crate::geometry::{retracted_cap, DomainSpec};
use crate::nonlinearity::{Nonlinearity, RescaledNonlinearity};
use crate::solver::{Drift, EllipticityPair, GridField};
use serde::{Deserialize, Serialize};

/// Fitted growth exponents below this value classify the instance as bounded.
pub const BLOWUP_BOUNDED_GAMMA: f64 = 0.1;

const LADDER_TOP: f64 = 1.0;
const LADDER_RATIO: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// `M_s` stays bounded as `s → 0`.
    S0,
    /// `M_s` grows like a negative power of `s`.
    S1ToS3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupRung {
    pub s: f64,
    pub m_s: f64,
    /// `s^α η_R(M_s)`.
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    /// Increasing in `s`.
    pub ladder: Vec<BlowupRung>,
    pub delta_trial: f64,
    /// Largest ladder `s` with `s^α η_R(M_s) ≤ δ`.
    pub s_critical: Option<f64>,
    /// Fitted from `M_s ≈ C s^{−γ}` on `s ≤ S` (the whole ladder when fewer than three rungs qualify).
    pub gamma: Option<f64>,
    pub alternative: Alternative,
    pub monotone: bool,
    pub notes: Vec<String>,
}

/// `M_s = sup_{Ω′_s} u` over a geometric ladder of collar widths, the critical
/// width `S`, and the fitted growth exponent `γ`.
///
/// `δ` is `√c₀` from the almost-maximum calibration, the value that makes
/// `s^{1/2}η_R(M) ≤ δ` coincide with the radius threshold `c₀/η_R(M)²`.
pub fn blowup_profile(
    field: &GridField,
    dom: &DomainSpec,
    ell: &EllipticityPair,
    scale: f64,
    nl: &Nonlinearity,
    alpha: f64,
) -> Result<BlowupReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let rnl = RescaledNonlinearity::new(nl.clone(), scale)?;
    let cap = retracted_cap(dom, 0.0)?;
    let mut notes = vec!["cap realized as the concrete substitute Ω ∩ B(0, 2.25) with Γ = ∂Ω ∩ B(0, 2)".to_string()];
    let nodes: Vec<(f64, f64)> = (0..field.values.len())
        .filter(|&k| field.is_active(k))
        .filter_map(|k| {
            let p = field.point(k);
            cap.contains(p).then(|| (cap.gamma_distance(p), field.values[k]))
        })
        .collect();
    if let Some(&(_, v)) = nodes.iter().find(|n| n.1 < -1e-8) {
        return Err(Error::Precondition(format!("field must be non-negative on the cap, found {v}")));
    }
    let floor = 2.0 * field.h;
    let mut widths = Vec::new();
    let mut s = LADDER_TOP;
    while s >= floor {
        widths.push(s);
        s /= LADDER_RATIO;
    }
    widths.reverse();
    let c0 = almost_max_threshold(1.0, &Drift::Rescaled(rnl.clone()), ell, 2.0)?.c0;
    let delta_trial = c0.sqrt();
    let mut ladder = Vec::new();
    for &s in &widths {
        let m_s = nodes.iter().filter(|n| n.0 >= s).map(|n| n.1).fold(f64::NEG_INFINITY, f64::max);
        if !m_s.is_finite() {
            notes.push(format!("retracted cap has no grid nodes at s = {s:.4}; ladder truncated"));
            break;
        }
        let criterion = if m_s > 0.0 { s.powf(alpha) * rnl.eta(m_s)? } else { s.powf(alpha) };
        ladder.push(BlowupRung { s, m_s, criterion });
    }
    if ladder.is_empty() {
        return Err(Error::Argument("the grid resolves no retracted cap on the ladder".into()));
    }
    let monotone = ladder.windows(2).all(|w| w[1].m_s <= w[0].m_s);
    let s_critical = ladder.iter().filter(|r| r.criterion <= delta_trial).map(|r| r.s).fold(None, |a: Option<f64>, s| Some(a.map_or(s, |a| a.max(s))));
    let below: Vec<&BlowupRung> = ladder.iter().filter(|r| s_critical.is_some_and(|sc| r.s <= sc) && r.m_s > 0.0).collect();
    let fit_set: Vec<&BlowupRung> = if below.len() >= 3 {
        below
    } else {
        notes.push("fewer than three rungs below S; gamma fitted on the whole ladder".into());
        ladder.iter().filter(|r| r.m_s > 0.0).collect()
    };
    let gamma = if fit_set.len() >= 2 {
        let n = fit_set.len() as f64;
        let mx = fit_set.iter().map(|r| r.s.ln()).sum::<f64>() / n;
        let my = fit_set.iter().map(|r| r.m_s.ln()).sum::<f64>() / n;
        let sxy: f64 = fit_set.iter().map(|r| (r.s.ln() - mx) * (r.m_s.ln() - my)).sum();
        let sxx: f64 = fit_set.iter().map(|r| (r.s.ln() - mx).powi(2)).sum();
        Some(-sxy / sxx)
    } else {
        None
    };
    let alternative = match gamma {
        Some(g) if g >= BLOWUP_BOUNDED_GAMMA => Alternative::S1ToS3,
        _ => Alternative::S0,
    };
    Ok(BlowupReport { ladder, delta_trial, s_critical, gamma, alternative, monotone, notes })
}
